#include "pdm/solver.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace pdm {

namespace {

Expr X(int a) { return Expr::x(a + 1); }

Expr q(const mpq_class& v) { return Expr(Gauss(v)); }

Vec3Expr gradient(const Expr& e) { return {differentiate(e, 1), differentiate(e, 2), differentiate(e, 3)}; }

Expr euler(const Expr& e) {
    Expr s;
    for (int a = 0; a < 3; ++a) s += X(a) * differentiate(e, a + 1);
    return s;
}

bool homogeneous(const Expr& e, int n) { return euler(e) == Expr(n) * e; }

int variant_class(int family) {
    switch (family) {
        case 1: return 0;
        case 2:
        case 3: return 1;
        case 4:
        case 5:
        case 6: return 2;
        default: return -1;
    }
}

KillingTensor zero_tensor() { return KillingTensor{}; }

KillingTensor delta(const Expr& g) {
    KillingTensor t{};
    for (int a = 0; a < 3; ++a) t[a][a] = g;
    return t;
}

Expr trace_part(const KillingTensor& mu) { return mu[0][0]; }

std::string first_residual(const DiffOp& c) {
    auto r = leading_residuals(c, 1);
    return r.empty() ? std::string() : r.front();
}

Expr parse_plain(const std::string& s) { return parse_expr(s, ParseContext{}); }

}  // namespace

std::string variant_name(MVariant v) {
    switch (v) {
        case MVariant::K0: return "K0-form";
        case MVariant::K1: return "K1-form";
        case MVariant::K2: return "K2-form";
    }
    return "?";
}

// ---------------------------------------------------------------- M matrix

MMatrix build_M(const KillingParams& p, MVariant v) {
    const int cls = static_cast<int>(v);
    KillingParams part = p;
    part.g = Expr();
    for (int m = 1; m <= 9; ++m) {
        if (p.weights[static_cast<std::size_t>(m)] == 0) continue;
        const bool nonzero = !is_zero(family_tensor(m, p));
        if (variant_class(m) != cls) {
            if (nonzero)
                throw InvalidVariant("family mu_" + std::to_string(m) + " is not of " + variant_name(v));
            part.weights[static_cast<std::size_t>(m)] = 0;
        }
    }
    part.weights[0] = 0;
    MMatrix out;
    out.variant = v;
    const KillingTensor mu = build(part);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.entries[a][b] = mu[a][b];
    if (v == MVariant::K1) {
        const mpq_class w = p.weights[2];
        const Vec3& second = p.mu2_trace_vector;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                out.entries[a][b] -= q(w * (p.lambda2[a] + second[a])) * X(b);
    } else if (v == MVariant::K2) {
        const mpq_class w = p.weights[6];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Expr s;
                for (int c = 0; c < 3; ++c)
                    if (p.lambda6[a][c] != 0) s += q(w * p.lambda6[a][c]) * X(c);
                out.entries[a][b] -= s * X(b);
            }
    }
    return out;
}

Expr det_condition(const MMatrix& m) {
    const auto& e = m.entries;
    return e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
           e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
}

Vec3Expr m_system(const MMatrix& m, const Expr& f) {
    const Vec3Expr df = gradient(f);
    Vec3Expr out{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out[a] += m.entries[a][b] * df[b];
    return out;
}

nlohmann::json GRecovery::to_json() const {
    nlohmann::json j{{"variant", variant_name(variant)},
                     {"degree", degree},
                     {"reading", reading},
                     {"homogeneity_ok", homogeneity_ok}};
    if (g_phi_rhs) j["g_phi_rhs"] = print(*g_phi_rhs);
    else j["g"] = print(g);
    return j;
}

GRecovery recover_g(const Expr& f, const MMatrix& m) {
    if (f.is_zero() || !homogeneous(f, 2))
        throw NotDilatationInvariant("x_a f_a != 2 f for f = " + print(f));
    const Vec3Expr w = m_system(m, f);
    Expr s;
    for (int a = 0; a < 3; ++a) s += X(a) * w[a];
    GRecovery out;
    out.variant = m.variant;
    out.degree = static_cast<int>(m.variant);
    switch (m.variant) {
        case MVariant::K0:
            out.g = -s / (Expr(2) * f);
            out.reading = "g = -x_a M^{ab} f_b / (2 f)";
            out.homogeneity_ok = homogeneous(out.g, 0);
            break;
        case MVariant::K1: {
            const Expr divided = -s / f;
            const Expr undivided = -s;
            if (homogeneous(divided, 1) || !homogeneous(undivided, 1)) {
                out.g = divided;
                out.reading = "g = -x_a M^{ab} f_b / f";
            } else {
                out.g = undivided;
                out.reading = "g = -x_a M^{ab} f_b";
            }
            out.homogeneity_ok = homogeneous(out.g, 1);
            break;
        }
        case MVariant::K2:
            out.g = f;  // times the open function G(phi, theta)
            out.reading = "g = f G(phi, theta)";
            out.g_phi_rhs = (X(0) * w[1] - X(1) * w[0]) / (f * f);
            out.homogeneity_ok = homogeneous(out.g, 2);
            break;
    }
    return out;
}

Expr g_phi_residual(const GRecovery& rec, const Expr& G) {
    if (!rec.g_phi_rhs) throw InvalidVariant("the G_phi constraint exists for the K2-form only");
    const Expr g_phi = X(0) * differentiate(G, 2) - X(1) * differentiate(G, 1);
    return g_phi - *rec.g_phi_rhs;
}

// ---------------------------------------------------------------- general-solution families

namespace {

IntegralTerm square(Gen g) { return IntegralTerm::bilinear(BilinearForm::Square, GenComb::single(g)); }

Expr checked_inverse(const Expr& den, const char* what) {
    if (den.is_zero()) throw DegenerateFamily(std::string("denominator of ") + what + " vanishes identically");
    return den.inverse();
}

}  // namespace

GeneratedPair family_L3sq(const Expr& F, const Expr& G, const Expr& N, const Expr& M) {
    const Expr rt2 = Expr::rt() * Expr::rt();
    const Expr den = rt2 * F - G;
    GeneratedPair p;
    p.name = "L3^2 family";
    p.f = rt2 * checked_inverse(den, "f");
    p.V = -(N + M) * checked_inverse(den, "V");
    p.q.label = "Q1";
    p.q.terms = {square(Gen::L3), IntegralTerm::fdoth(G), IntegralTerm::scalar(N + M)};
    return p;
}

GeneratedPair family_L3sq_dilatation(const Expr& F, const Expr& G, const Expr& R, const Expr& N) {
    const Expr rt2 = Expr::rt() * Expr::rt();
    const Expr inv = checked_inverse(F + G, "f");
    GeneratedPair p;
    p.name = "L3^2 family, dilatation only";
    p.f = rt2 * inv;
    p.V = (R + N) * inv;
    p.q.label = "Q";
    IntegralTerm fh = IntegralTerm::fdoth(F);
    fh.coeff = Expr(-1);
    p.q.terms = {square(Gen::L3), fh, IntegralTerm::scalar(N)};
    return p;
}

GeneratedPair family_P3sq(const Expr& F, const Expr& G, const Expr& M, const Expr& N) {
    const Expr inv = checked_inverse(F + G, "f");
    GeneratedPair p;
    p.name = "P3^2 family";
    p.f = inv;
    p.V = (M + N) * inv;
    p.q.label = "Q2";
    IntegralTerm fh = IntegralTerm::fdoth(G);
    fh.coeff = Expr(-1);
    p.q.terms = {square(Gen::P3), fh, IntegralTerm::scalar(N)};
    return p;
}

nlohmann::json PairCheck::to_json() const {
    nlohmann::json j{{"family", name},         {"instance", instance},   {"commutes", commutes},
                     {"m1_zero", m1_zero},     {"m2_printed_zero", m2_printed_zero},
                     {"anomaly_zero", anomaly_zero}};
    if (!residual.empty()) j["residual"] = residual;
    return j;
}

PairCheck check_pair(const GeneratedPair& p, const std::string& instance) {
    PairCheck out;
    out.name = p.name;
    out.instance = instance;
    const DiffOp Q = realize(p.q, p.f, p.V);
    const DiffOp C = commutator(hamiltonian(p.f, p.V), Q);
    out.commutes = C.is_zero();
    if (!out.commutes) out.residual = first_residual(C);
    if (auto form = second_order_form(Q)) {
        const DeterminingResidual r = check_all(p.f, p.V, form->first, form->second);
        if (r.commutator_zero != out.commutes) throw InternalError("check_all disagrees with the commutator");
        out.m1_zero = r.m1_zero;
        out.m2_printed_zero = r.m2_printed_zero;
        out.anomaly_zero = is_zero(r.anomaly);
    }
    return out;
}

namespace {

using Pool = std::vector<const char*>;

std::vector<GeneratedPair> sample_family(int n, std::uint64_t seed, const std::array<Pool, 4>& pools,
                                         GeneratedPair (*make)(const Expr&, const Expr&, const Expr&, const Expr&),
                                         const char* names) {
    std::mt19937_64 rng(seed);
    std::vector<GeneratedPair> out;
    std::set<std::array<std::size_t, 4>> seen;
    int guard = 0;
    while (static_cast<int>(out.size()) < n && guard++ < 1000) {
        std::array<std::size_t, 4> pick{};
        for (std::size_t k = 0; k < 4; ++k)
            pick[k] = std::uniform_int_distribution<std::size_t>(0, pools[k].size() - 1)(rng);
        if (!seen.insert(pick).second) continue;
        std::array<Expr, 4> e;
        std::string label;
        for (std::size_t k = 0; k < 4; ++k) {
            e[k] = parse_plain(pools[k][pick[k]]);
            if (k) label += ", ";
            label += std::string(1, names[k]) + " = " + pools[k][pick[k]];
        }
        try {
            GeneratedPair p = make(e[0], e[1], e[2], e[3]);
            p.name += " [" + label + "]";
            out.push_back(std::move(p));
        } catch (const DegenerateFamily&) {
        }
    }
    return out;
}

}  // namespace

std::vector<GeneratedPair> sample_L3sq(int n, std::uint64_t seed) {
    static const std::array<Pool, 4> pools = {
        Pool{"1", "2 + x3^2", "1 + x3/rt", "3 + rt^2", "2 + x3^2/rt^2"},
        Pool{"phi", "1 + phi^2", "2*phi - 1", "phi^3 + 2", "3*phi"},
        Pool{"phi", "phi^2", "1", "2 - phi", "0"},
        Pool{"0", "x3", "rt^2", "1/x3^2", "x3*rt"}};
    return sample_family(n, seed, pools, &family_L3sq, "FGNM");
}

std::vector<GeneratedPair> sample_L3sq_dilatation(int n, std::uint64_t seed) {
    static const std::array<Pool, 4> pools = {
        Pool{"1 + phi^2", "2 + phi", "phi^2 + 3", "3*phi + 1", "phi^3 + 5"},
        Pool{"theta", "1 + theta^2", "2*theta + 1", "theta^3", "3"},
        Pool{"theta", "theta^2", "1", "0", "2*theta - 1"},
        Pool{"phi", "phi^2", "1", "0", "2 - phi"}};
    return sample_family(n, seed, pools, &family_L3sq_dilatation, "FGRN");
}

std::vector<GeneratedPair> sample_P3sq(int n, std::uint64_t seed) {
    static const std::array<Pool, 4> pools = {
        Pool{"x1^2 + x2^2", "1 + x1", "x1*x2 + 3", "x1^2 + 2*x2", "2 + x2^2"},
        Pool{"x3^2", "x3", "1 + x3^3", "2*x3^2 + 1", "x3 + 3"},
        Pool{"1", "x1", "x1*x2", "x2^2 + 1", "0"},
        Pool{"x3", "1", "x3^2", "0", "2*x3 + 1"}};
    return sample_family(n, seed, pools, &family_P3sq, "FGMN");
}

// ---------------------------------------------------------------- exact fitting helpers

namespace {

/// Values of expressions at the first n pole-free points of a deterministic pool.
class Collocation {
public:
    Collocation(int n, std::uint64_t salt) : pool_(sample_points(std::max(3 * n + 8, 16), salt)), want_(n) {}

    /// Evaluates every expression at the points; points where any expression
    /// has a pole are skipped. Returns values[point][expr].
    std::vector<std::vector<Gauss>> evaluate(const std::vector<Expr>& exprs) {
        std::vector<std::vector<Gauss>> out;
        for (const auto& p : pool_) {
            if (static_cast<int>(out.size()) >= want_) break;
            std::vector<Gauss> row;
            row.reserve(exprs.size());
            try {
                for (const auto& e : exprs) row.push_back(e.is_zero() ? Gauss(0) : value_at(e, p));
            } catch (const PoleAtPoint&) {
                continue;
            } catch (const InconsistentPoint&) {
                continue;
            }
            out.push_back(std::move(row));
        }
        return out;
    }

private:
    std::vector<PointSample> pool_;
    int want_;
};

/// Five linear functionals of a symmetric tensor that vanish exactly on
/// multiples of the identity: the off-diagonal entries and two diagonal differences.
std::array<Expr, 5> traceless_view(const KillingTensor& t) {
    return {t[0][1], t[0][2], t[1][2], t[0][0] - t[1][1], t[0][0] - t[2][2]};
}

/// Coefficients c with target - sum c_k basis_k = delta g, and that g.
std::optional<std::pair<GaussVector, Expr>> fit_modulo_trace(const KillingTensor& target,
                                                             const std::vector<KillingTensor>& basis) {
    const std::size_t n = basis.size();
    std::vector<Expr> exprs;
    for (const auto& b : basis)
        for (const auto& e : traceless_view(b)) exprs.push_back(e);
    for (const auto& e : traceless_view(target)) exprs.push_back(e);
    const int points = static_cast<int>(2 * n / 5 + 6);
    Collocation col(points, 0x7a11);
    const auto values = col.evaluate(exprs);
    GaussMatrix A(0, n);
    GaussVector rhs;
    for (const auto& v : values)
        for (std::size_t r = 0; r < 5; ++r) {
            GaussVector row(n);
            for (std::size_t k = 0; k < n; ++k) row[k] = v[k * 5 + r];
            A.append_row(row);
            rhs.push_back(v[n * 5 + r]);
        }
    auto c = solve(A, rhs);
    if (!c) return std::nullopt;
    KillingTensor rest = target;
    for (std::size_t k = 0; k < n; ++k)
        if (!(*c)[k].is_zero()) rest = rest + scale(basis[k], -Expr((*c)[k]));
    for (const auto& e : traceless_view(rest))
        if (!e.is_zero()) return std::nullopt;
    return std::make_pair(*c, trace_part(rest));
}

struct BilinearBasis {
    std::vector<IntegralTerm> terms;
    std::vector<KillingTensor> mu;
    std::vector<Expr> eta;
};

const BilinearBasis& bilinear_basis() {
    static const BilinearBasis basis = [] {
        BilinearBasis b;
        for (std::size_t i = 0; i < kAllGens.size(); ++i)
            for (std::size_t j = i; j < kAllGens.size(); ++j) {
                IntegralTerm t = i == j ? square(kAllGens[i])
                                        : IntegralTerm::bilinear(BilinearForm::Anticommutator,
                                                                 GenComb::single(kAllGens[i]),
                                                                 GenComb::single(kAllGens[j]));
                const auto form = second_order_form(realize(t, Expr(1), Expr()));
                if (!form) throw InternalError("generator bilinear is not of second-order form");
                b.terms.push_back(t);
                b.mu.push_back(form->first);
                b.eta.push_back(form->second);
            }
        return b;
    }();
    return basis;
}

}  // namespace

std::optional<IntegralSpec> to_integral_spec(const KillingTensor& mu, const Expr& eta, const Expr& f,
                                             const Expr& V) {
    const BilinearBasis& b = bilinear_basis();
    const auto fit = fit_modulo_trace(mu, b.mu);
    if (!fit) return std::nullopt;
    IntegralSpec spec;
    Expr scalar = eta;
    for (std::size_t k = 0; k < b.terms.size(); ++k) {
        const Gauss& c = fit->first[k];
        if (c.is_zero()) continue;
        IntegralTerm t = b.terms[k];
        t.coeff = Expr(c);
        spec.terms.push_back(t);
        scalar -= Expr(c) * b.eta[k];
    }
    const Expr F = fit->second / f;
    if (!F.is_zero()) {
        spec.terms.push_back(IntegralTerm::fdoth(F));
        scalar -= F * V;
    }
    if (!scalar.is_zero()) spec.terms.push_back(IntegralTerm::scalar(scalar));
    if (realize(spec, f, V) != from_second_order(mu, eta))
        throw InternalError("table-notation rendering does not reproduce the operator");
    return spec;
}

// ---------------------------------------------------------------- ansatz search

namespace {

/// One constant slot of a Killing family: a traceless-matrix basis element,
/// a vector component, or the constant k of mu_5 (set to 1).
struct Slot {
    int family;
    int index;
};

bool matrix_family(int m) { return m == 1 || m == 3 || m == 6 || m == 8 || m == 9; }
bool vector_family(int m) { return m == 2 || m == 4 || m == 7; }

Mat3& matrix_slot(KillingParams& p, int m) {
    switch (m) {
        case 1: return p.lambda1;
        case 3: return p.lambda3;
        case 6: return p.lambda6;
        case 8: return p.lambda8;
        default: return p.lambda9;
    }
}

Vec3& vector_slot(KillingParams& p, int m) {
    switch (m) {
        case 2: return p.lambda2;
        case 4: return p.lambda4;
        default: return p.lambda7;
    }
}

/// Adds c times the slot to corrected-variant parameters (weights 1, k = 1).
void add_slot(KillingParams& p, const Slot& s, const mpq_class& c) {
    if (matrix_family(s.family)) {
        const Mat3& e = traceless_basis()[static_cast<std::size_t>(s.index)];
        Mat3& m = matrix_slot(p, s.family);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) m[a][b] += c * e[a][b];
        if (s.family == 6)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) p.lambda5[a][b] += c * e[a][b];
    } else if (vector_family(s.family)) {
        vector_slot(p, s.family)[static_cast<std::size_t>(s.index)] += c;
        if (s.family == 2) p.mu2_trace_vector[static_cast<std::size_t>(s.index)] += c;
    } else if (s.family == 5) {
        p.weights[5] += c;
    }
}

KillingParams empty_params() {
    KillingParams p;
    p.variant = KillingVariant::Corrected;
    p.k = 1;
    p.weights[5] = 0;
    return p;
}

std::vector<std::pair<Slot, AnsatzTensor>> slot_tensors(const std::vector<int>& families) {
    std::vector<std::pair<Slot, AnsatzTensor>> out;
    std::set<int> fams(families.begin(), families.end());
    for (int m : fams) {
        const int n = matrix_family(m) ? 5 : vector_family(m) ? 3 : m == 5 ? 1 : 0;
        for (int k = 0; k < n; ++k) {
            const Slot s{m, k};
            KillingParams p = empty_params();
            for (auto& w : p.weights) w = 0;
            p.weights[static_cast<std::size_t>(m)] = 1;
            if (m != 5) add_slot(p, s, 1);
            KillingTensor t = family_tensor(m, p);
            if (is_zero(t)) continue;
            const std::string label = "mu" + std::to_string(m) + "[" +
                                      (m == 5 ? std::string("k=1")
                                              : (matrix_family(m) ? "e" : "x") + std::to_string(k + 1)) +
                                      "]";
            out.push_back({s, AnsatzTensor{label, t}});
        }
    }
    return out;
}

}  // namespace

std::vector<AnsatzTensor> killing_slot_tensors(const std::vector<int>& families) {
    std::vector<AnsatzTensor> out;
    for (auto& st : slot_tensors(families)) out.push_back(std::move(st.second));
    return out;
}

std::optional<KillingParams> decompose_killing(const KillingTensor& mu) {
    const auto slots = slot_tensors({1, 2, 3, 4, 5, 6, 7, 8, 9});
    std::vector<KillingTensor> basis;
    for (const auto& st : slots) basis.push_back(st.second.mu);
    const auto fit = fit_modulo_trace(mu, basis);
    if (!fit) return std::nullopt;
    KillingParams p = empty_params();
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const Gauss& c = fit->first[k];
        if (c.is_zero()) continue;
        if (!c.is_real()) return std::nullopt;
        add_slot(p, slots[k].first, c.re());
    }
    p.g = fit->second;
    for (int m = 1; m <= 9; ++m)
        if (m != 5) p.weights[static_cast<std::size_t>(m)] = is_zero(family_tensor(m, p)) ? 0 : 1;
    if (!(build(p) == mu)) throw InternalError("Killing decomposition does not rebuild the tensor");
    return p;
}

nlohmann::json AnsatzSolution::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& g : coefficients) c.push_back(g.str());
    return {{"integral", text}, {"coefficients", c}};
}

nlohmann::json AnsatzResult::to_json() const {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& x : solutions) s.push_back(x.to_json());
    return {{"unknowns", unknowns},
            {"rows", rows},
            {"nullspace_dimension", nullspace_dimension},
            {"rejected", rejected},
            {"classical", classical},
            {"solutions", s}};
}

namespace {

struct Column {
    Vec3Expr m1{};
    Vec3Expr m2{};
};

Column tensor_column(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta, bool classical) {
    return {residual_m1(f, mu), classical ? residual_m2(f, V, mu, eta) : residual_m2_completed(f, V, mu, eta)};
}

}  // namespace

AnsatzResult ansatz_solve(const AnsatzProblem& pb) {
    const Expr& f = pb.f;
    const Expr& V = pb.V;
    std::vector<Column> cols;
    for (const auto& t : pb.tensors) cols.push_back(tensor_column(f, V, t.mu, Expr(), pb.classical));
    for (const auto& F : pb.fh_dictionary) cols.push_back(tensor_column(f, V, delta(F * f), F * V, pb.classical));
    for (const auto& e : pb.eta_dictionary) cols.push_back(tensor_column(f, V, zero_tensor(), e, pb.classical));
    const std::size_t n = cols.size();
    AnsatzResult res;
    res.classical = pb.classical;
    res.unknowns = static_cast<int>(n);
    if (n == 0) return res;
    std::optional<Column> fixed;
    if (pb.fixed) fixed = tensor_column(f, V, pb.fixed->mu, Expr(), pb.classical);

    const int want = pb.points > 0 ? pb.points : static_cast<int>(2 * n);
    std::vector<Expr> exprs;
    for (const auto& c : cols)
        for (int a = 0; a < 3; ++a) {
            exprs.push_back(c.m1[a]);
            exprs.push_back(c.m2[a]);
        }
    if (fixed)
        for (int a = 0; a < 3; ++a) {
            exprs.push_back(fixed->m1[a]);
            exprs.push_back(fixed->m2[a]);
        }
    Collocation col(want, pb.salt);
    const auto values = col.evaluate(exprs);
    GaussMatrix A(0, n);
    GaussVector rhs;
    for (const auto& v : values)
        for (std::size_t r = 0; r < 6; ++r) {
            GaussVector row(n);
            for (std::size_t k = 0; k < n; ++k) row[k] = v[k * 6 + r];
            A.append_row(row);
            rhs.push_back(fixed ? -v[n * 6 + r] : Gauss(0));
        }
    res.rows = static_cast<int>(A.rows());
    if (A.rows() < n)
        throw NeedMorePoints(std::to_string(A.rows()) + " collocation rows for " + std::to_string(n) + " unknowns");

    auto assemble = [&](const GaussVector& c, bool with_fixed) {
        KillingTensor mu = with_fixed ? pb.fixed->mu : zero_tensor();
        Expr eta;
        std::size_t k = 0;
        for (const auto& t : pb.tensors) {
            if (!c[k].is_zero()) mu = mu + scale(t.mu, Expr(c[k]));
            ++k;
        }
        for (const auto& F : pb.fh_dictionary) {
            if (!c[k].is_zero()) {
                mu = mu + delta(Expr(c[k]) * F * f);
                eta += Expr(c[k]) * F * V;
            }
            ++k;
        }
        for (const auto& e : pb.eta_dictionary) {
            if (!c[k].is_zero()) eta += Expr(c[k]) * e;
            ++k;
        }
        return std::make_pair(mu, eta);
    };

    std::vector<DiffOp> accepted;
    auto accept = [&](const GaussVector& c, bool with_fixed) {
        auto [mu, eta] = assemble(c, with_fixed);
        DiffOp op = from_second_order(mu, eta);
        if (op.is_zero()) return;
        const DeterminingResidual r = check_all(f, V, mu, eta);
        if (!(pb.classical ? r.printed_all_zero : r.all_zero)) {
            ++res.rejected;
            return;
        }
        if (!accepted.empty() && span_coefficients(op, accepted)) return;
        accepted.push_back(op);
        AnsatzSolution s;
        s.mu = mu;
        s.eta = eta;
        s.op = op;
        s.coefficients = c;
        if (auto spec = to_integral_spec(mu, eta, f, V)) s.text = print(*spec);
        else s.text = "p mu p + " + print(eta);
        res.solutions.push_back(std::move(s));
    };

    const auto null = A.nullspace();
    res.nullspace_dimension = static_cast<int>(null.size());
    if (fixed) {
        if (auto x = solve(A, rhs)) accept(*x, true);
    } else {
        for (const auto& v : null) accept(v, false);
    }
    return res;
}

AnsatzProblem ansatz_problem(const CatalogEntry& e, const SystemInstance& s, std::uint64_t salt) {
    if (!e.basis) throw InvalidParams("entry " + e.id + " declares no ansatz basis");
    AnsatzProblem pb;
    pb.f = s.f;
    pb.V = s.V;
    pb.tensors = killing_slot_tensors(e.basis->families);
    for (const auto& t : e.basis->g) pb.fh_dictionary.push_back(parse_expr(t, s.ctx));
    for (const auto& t : e.basis->eta) pb.eta_dictionary.push_back(parse_expr(t, s.ctx));
    pb.salt = salt;
    return pb;
}

nlohmann::json RecoveryResult::to_json() const {
    return {{"integral", label}, {"recovered", recovered}, {"commutes", commutes}};
}

std::vector<RecoveryResult> recover_printed(const SystemInstance& s, const AnsatzResult& r) {
    std::vector<DiffOp> span;
    for (const auto& x : r.solutions) span.push_back(x.op);
    const DiffOp H = hamiltonian(s.f, s.V);
    span.push_back(H);
    span.push_back(DiffOp::identity());
    for (std::size_t i = 0; i < s.lie.size(); ++i)
        for (std::size_t j = i; j < s.lie.size(); ++j)
            span.push_back(anticommutator(realize(s.lie[i]), realize(s.lie[j])));
    std::vector<RecoveryResult> out;
    for (const auto& q : s.integrals) {
        RecoveryResult rr;
        rr.label = q.label;
        const DiffOp Q = realize(q, s.f, s.V);
        rr.commutes = commutator(H, Q).is_zero();
        rr.recovered = span_coefficients(Q, span).has_value();
        out.push_back(rr);
    }
    return out;
}

// ---------------------------------------------------------------- reduction survey

nlohmann::json MReduction::to_json() const {
    nlohmann::json j{{"integral", label}, {"status", status}};
    if (variant) {
        j["variant"] = variant_name(*variant);
        j["system_holds"] = system_holds;
        j["det_zero"] = det_zero;
        j["det"] = det;
        j["g_matches"] = g_matches;
    }
    return j;
}

std::vector<MReduction> m_reduction(const SystemInstance& s) {
    std::vector<MReduction> out;
    for (const auto& q : s.integrals) {
        MReduction r;
        r.label = q.label;
        const auto form = second_order_form(realize(q, s.f, s.V));
        if (!form) {
            r.status = "no second-order form";
            out.push_back(r);
            continue;
        }
        const auto params = decompose_killing(form->first);
        if (!params) {
            r.status = "not a conformal Killing tensor plus trace";
            out.push_back(r);
            continue;
        }
        std::set<int> classes;
        for (int m = 1; m <= 9; ++m)
            if (params->weights[static_cast<std::size_t>(m)] != 0) classes.insert(variant_class(m));
        if (classes.size() != 1 || *classes.begin() < 0) {
            r.status = classes.empty() ? "trace term only" : "mixed degrees";
            out.push_back(r);
            continue;
        }
        const auto v = static_cast<MVariant>(*classes.begin());
        r.variant = v;
        const MMatrix M = build_M(*params, v);
        r.system_holds = is_zero(m_system(M, s.f));
        const Expr det = det_condition(M);
        r.det_zero = det.is_zero();
        r.det = print(det);
        try {
            const GRecovery g = recover_g(s.f, M);
            if (g.g_phi_rhs) {
                const Expr G = params->g / s.f;
                r.g_matches = g_phi_residual(g, G).is_zero();
            } else {
                r.g_matches = g.g == params->g;
            }
            r.status = "ok";
        } catch (const NotDilatationInvariant&) {
            r.status = "f is not homogeneous of degree 2";
        }
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- shift invariance

nlohmann::json ShiftCandidate::to_json() const {
    nlohmann::json j{{"candidate", name}, {"closes", closes}};
    if (solution) j["integral"] = solution->text;
    return j;
}

std::vector<ShiftCandidate> shift_reduction(const Expr& f, const Expr& V) {
    struct Cand {
        const char* name;
        BilinearForm form;
        Gen a, b;
    };
    static const Cand cands[] = {
        {"P3 P1", BilinearForm::Product, Gen::P3, Gen::P1},
        {"P3 P2", BilinearForm::Product, Gen::P3, Gen::P2},
        {"{P1, D}", BilinearForm::Anticommutator, Gen::P1, Gen::D},
        {"{P2, D}", BilinearForm::Anticommutator, Gen::P2, Gen::D},
        {"{P3, D}", BilinearForm::Anticommutator, Gen::P3, Gen::D},
        {"{P3, L1}", BilinearForm::Anticommutator, Gen::P3, Gen::L1},
        {"{P3, L2}", BilinearForm::Anticommutator, Gen::P3, Gen::L2},
        {"{P3, L3}", BilinearForm::Anticommutator, Gen::P3, Gen::L3},
    };
    // Polynomials of degree <= 2 serve as (F . H) multipliers; the scalar
    // dictionary adds them and their products with V.
    std::vector<Expr> monomials = {Expr(1)};
    for (int a = 0; a < 3; ++a) monomials.push_back(X(a));
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) monomials.push_back(X(a) * X(b));
    AnsatzProblem pb;
    pb.f = f;
    pb.V = V;
    pb.fh_dictionary = monomials;
    for (const auto& m : monomials) pb.eta_dictionary.push_back(m);
    if (!V.is_zero())
        for (const auto& m : monomials) {
            const Expr mv = m * V;
            if (!mv.is_constant()) pb.eta_dictionary.push_back(mv);
        }
    std::vector<ShiftCandidate> out;
    for (const auto& c : cands) {
        ShiftCandidate sc;
        sc.name = c.name;
        const IntegralTerm t = IntegralTerm::bilinear(c.form, GenComb::single(c.a), GenComb::single(c.b));
        const auto form = second_order_form(realize(t, Expr(1), Expr()));
        if (!form) throw InternalError("candidate bilinear is not of second-order form");
        pb.fixed = AnsatzTensor{c.name, form->first};
        const AnsatzResult r = ansatz_solve(pb);
        if (!r.solutions.empty()) {
            sc.closes = true;
            AnsatzSolution sol = r.solutions.front();
            // Render as the candidate itself plus (F . H) and scalar terms.
            const Expr F = (sol.mu[0][0] - form->first[0][0]) / f;
            IntegralSpec spec;
            spec.terms.push_back(t);
            if (!F.is_zero()) spec.terms.push_back(IntegralTerm::fdoth(F));
            const Expr scalar = sol.eta - form->second - F * V;
            if (!scalar.is_zero()) spec.terms.push_back(IntegralTerm::scalar(scalar));
            if (realize(spec, f, V) != sol.op) throw InternalError("shift candidate rendering mismatch");
            sol.text = print(spec);
            sc.solution = std::move(sol);
        }
        out.push_back(std::move(sc));
    }
    return out;
}

}  // namespace pdm
