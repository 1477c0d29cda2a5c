#include "pdm/oracle.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>

namespace pdm {

// ---------------------------------------------------------------- scalars

namespace {

template <class S>
S from_gauss(const Gauss& g);
template <>
Gauss from_gauss<Gauss>(const Gauss& g) {
    return g;
}
template <>
Complex from_gauss<Complex>(const Gauss& g) {
    return {g.real_double(), g.imag_double()};
}

template <class S>
S from_q(const mpq_class& q) {
    return from_gauss<S>(Gauss(q));
}

template <class S>
bool is_zero_scalar(const S& s);
template <>
bool is_zero_scalar<Gauss>(const Gauss& s) {
    return s.is_zero();
}
template <>
bool is_zero_scalar<Complex>(const Complex& s) {
    return s == Complex(0.0, 0.0);
}

template <class S>
S inverse_scalar(const S& s) {
    if (is_zero_scalar(s)) throw PoleAtPoint("pole at the sample point");
    return S(1) / s;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string q_str(const mpq_class& q) { return q.get_str(); }

}  // namespace

// ---------------------------------------------------------------- points

mpq_class PointSample::surrogate(VarId v) const {
    std::mt19937_64 rng(fnv1a(Registry::instance().name(v)) ^ (salt * 0x9e3779b97f4a7c15ull));
    std::uniform_int_distribution<long> num(1, 29), den(1, 13), sign(0, 1);
    mpq_class q(num(rng) * (sign(rng) ? 1 : -1), den(rng));
    q.canonicalize();
    return q;
}

mpq_class PointSample::r() const {
    mpq_class out;
    if (!rational_sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], out))
        throw InconsistentPoint("r is irrational at " + str());
    return out;
}

mpq_class PointSample::rt() const {
    mpq_class out;
    if (!rational_sqrt(x[0] * x[0] + x[1] * x[1], out)) throw InconsistentPoint("rt is irrational at " + str());
    return out;
}

std::string PointSample::str() const {
    return "(" + q_str(x[0]) + ", " + q_str(x[1]) + ", " + q_str(x[2]) + ")";
}

const std::vector<PointSample>& default_points() {
    static const std::vector<PointSample> pts = [] {
        const std::array<std::array<long, 6>, 8> raw = {{{3, 1, 4, 1, 12, 1},
                                                         {9, 1, 12, 1, 20, 1},
                                                         {12, 1, 16, 1, 15, 1},
                                                         {7, 1, 24, 1, 60, 1},
                                                         {2, 1, 15, 4, 36, 1},
                                                         {5, 4, 3, 1, 21, 1},
                                                         {-4, 1, 3, 1, 12, 1},
                                                         {3, 2, -2, 1, -6, 1}}};
        std::vector<PointSample> v;
        std::uint64_t k = 0;
        for (const auto& p : raw) {
            PointSample s;
            for (int a = 0; a < 3; ++a) {
                s.x[a] = mpq_class(p[2 * a], p[2 * a + 1]);
                s.x[a].canonicalize();
            }
            s.salt = ++k;
            v.push_back(s);
        }
        return v;
    }();
    return pts;
}

std::vector<PointSample> sample_points(int n, std::uint64_t salt) {
    std::vector<PointSample> out;
    const auto& d = default_points();
    for (int k = 0; k < n; ++k) {
        PointSample s = d[static_cast<std::size_t>(k) % d.size()];
        const long j = k / static_cast<long>(d.size());
        if (j > 0) {
            mpq_class scale(2 * j + 1, 2 * j + 3);
            for (auto& c : s.x) c *= scale;
        }
        s.salt = salt * 1000003ull + static_cast<std::uint64_t>(k) + 1;
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------- jet indexing

namespace jet {

namespace {
struct Tables {
    std::vector<MultiIndex> exps;
    int idx[5][5][5];
    std::vector<std::tuple<int, int, int>> mult;  // (i, j, k): y^i * y^j = y^k, sorted by degree of k
    std::array<std::size_t, kDegree + 1> mult_end{};  // entries with deg(k) <= d end here
    std::array<int, kDegree + 1> size_upto{};         // number of monomials of degree <= d
    Tables() {
        for (auto& a : idx)
            for (auto& b : a)
                for (auto& c : b) c = -1;
        for (int d = 0; d <= kDegree; ++d)
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b) {
                    const int c = d - a - b;
                    idx[a][b][c] = static_cast<int>(exps.size());
                    exps.push_back({a, b, c});
                }
        for (int i = 0; i < kSize; ++i)
            for (int j = 0; j < kSize; ++j) {
                const auto& e = exps[static_cast<std::size_t>(i)];
                const auto& f = exps[static_cast<std::size_t>(j)];
                const int a = e[0] + f[0], b = e[1] + f[1], c = e[2] + f[2];
                if (a + b + c <= kDegree) mult.emplace_back(i, j, idx[a][b][c]);
            }
        std::stable_sort(mult.begin(), mult.end(), [&](const auto& x, const auto& y) {
            const auto& ex = exps[static_cast<std::size_t>(std::get<2>(x))];
            const auto& ey = exps[static_cast<std::size_t>(std::get<2>(y))];
            return ex[0] + ex[1] + ex[2] < ey[0] + ey[1] + ey[2];
        });
        for (int d = 0; d <= kDegree; ++d) {
            std::size_t n = 0;
            while (n < mult.size()) {
                const auto& e = exps[static_cast<std::size_t>(std::get<2>(mult[n]))];
                if (e[0] + e[1] + e[2] > d) break;
                ++n;
            }
            mult_end[static_cast<std::size_t>(d)] = n;
            int m = 0;
            while (m < static_cast<int>(exps.size()) && exps[static_cast<std::size_t>(m)][0] + exps[static_cast<std::size_t>(m)][1] + exps[static_cast<std::size_t>(m)][2] <= d) ++m;
            size_upto[static_cast<std::size_t>(d)] = m;
        }
    }
};
const Tables& tables() {
    static const Tables t;
    return t;
}
}  // namespace

int index(int a, int b, int c) {
    if (a < 0 || b < 0 || c < 0 || a + b + c > kDegree) return -1;
    return tables().idx[a][b][c];
}
const MultiIndex& exponent(int i) { return tables().exps[static_cast<std::size_t>(i)]; }

}  // namespace jet

namespace {
long factorial(int n) {
    long f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}
}  // namespace

// ---------------------------------------------------------------- Jet

template <class S>
Jet<S> Jet<S>::coordinate(const S& p, int a, int order) {
    Jet j = constant(p, order);
    if (order >= 1) {
        MultiIndex m{0, 0, 0};
        m[static_cast<std::size_t>(a)] = 1;
        j.c_[static_cast<std::size_t>(jet::index(m[0], m[1], m[2]))] = S(1);
    }
    return j;
}

template <class S>
S Jet<S>::derivative(const MultiIndex& alpha) const {
    const int i = jet::index(alpha[0], alpha[1], alpha[2]);
    if (i < 0 || alpha[0] + alpha[1] + alpha[2] > order_) throw OrderLimit("jet derivative beyond the truncation degree");
    return S(factorial(alpha[0]) * factorial(alpha[1]) * factorial(alpha[2])) * c_[static_cast<std::size_t>(i)];
}

template <class S>
Jet<S>& Jet<S>::operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    const int n = jet::tables().size_upto[static_cast<std::size_t>(order_)];
    for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
    for (int i = n; i < jet::kSize; ++i) c_[static_cast<std::size_t>(i)] = S(0);
    return *this;
}

template <class S>
Jet<S>& Jet<S>::operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    const int n = jet::tables().size_upto[static_cast<std::size_t>(order_)];
    for (int i = 0; i < n; ++i) c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
    for (int i = n; i < jet::kSize; ++i) c_[static_cast<std::size_t>(i)] = S(0);
    return *this;
}

template <class S>
Jet<S> Jet<S>::operator*(const Jet& b) const {
    Jet out;
    out.order_ = std::min(order_, b.order_);
    const auto& t = jet::tables();
    const std::size_t end = t.mult_end[static_cast<std::size_t>(out.order_)];
    for (std::size_t n = 0; n < end; ++n) {
        const auto& [i, j, k] = t.mult[n];
        const S& x = c_[static_cast<std::size_t>(i)];
        const S& y = b.c_[static_cast<std::size_t>(j)];
        if (is_zero_scalar(x) || is_zero_scalar(y)) continue;
        out.c_[static_cast<std::size_t>(k)] += x * y;
    }
    return out;
}

namespace {
/// sum_{j=0..4} w_j N^j for a nilpotent jet N (zero value).
template <class S>
Jet<S> series(const Jet<S>& n, const std::array<S, 5>& w) {
    Jet<S> out = Jet<S>::constant(w[0], n.order());
    Jet<S> pw = Jet<S>::constant(S(1), n.order());
    for (int k = 1; k <= n.order(); ++k) {
        pw = pw * n;
        out += w[static_cast<std::size_t>(k)] * pw;
    }
    return out;
}
}  // namespace

template <class S>
Jet<S> Jet<S>::reciprocal() const {
    const S inv = inverse_scalar(value());
    Jet n = inv * *this;
    n.c_[0] = S(0);
    const std::array<S, 5> w = {S(1), S(-1), S(1), S(-1), S(1)};
    return inv * series(n, w);
}

template <class S>
Jet<S> Jet<S>::sqrt_with(const S& root) const {
    const S inv = inverse_scalar(value());
    Jet n = inv * *this;
    n.c_[0] = S(0);
    const std::array<S, 5> w = {S(1), from_gauss<S>(Gauss::frac(1, 2)), from_gauss<S>(Gauss::frac(-1, 8)),
                                from_gauss<S>(Gauss::frac(1, 16)), from_gauss<S>(Gauss::frac(-5, 128))};
    return root * series(n, w);
}

template <class S>
Jet<S> Jet<S>::exp_with(const S& v) const {
    Jet n = *this;
    n.c_[0] = S(0);
    const std::array<S, 5> w = {S(1), S(1), from_gauss<S>(Gauss::frac(1, 2)), from_gauss<S>(Gauss::frac(1, 6)),
                                from_gauss<S>(Gauss::frac(1, 24))};
    return v * series(n, w);
}

template <class S>
Jet<S> Jet<S>::pow(int n) const {
    if (n < 0) return reciprocal().pow(-n);
    Jet out = constant(S(1), order_), base = *this;
    while (n) {
        if (n & 1) out = out * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return out;
}

template <class S>
Jet<S> Jet<S>::integrate(const S& value, const std::array<Jet, 3>& g) {
    const int order = std::min({g[0].order_, g[1].order_, g[2].order_}) + 1;
    Jet out = constant(value, std::min(order, jet::kDegree));
    for (int i = 1; i < jet::tables().size_upto[static_cast<std::size_t>(out.order_)]; ++i) {
        const auto& e = jet::exponent(i);
        const int k = e[0] + e[1] + e[2];
        S s(0);
        for (int a = 0; a < 3; ++a) {
            if (e[static_cast<std::size_t>(a)] == 0) continue;
            MultiIndex m = e;
            --m[static_cast<std::size_t>(a)];
            s += g[static_cast<std::size_t>(a)][jet::index(m[0], m[1], m[2])];
        }
        out.c_[static_cast<std::size_t>(i)] = from_gauss<S>(Gauss::frac(1, k)) * s;
    }
    return out;
}

template class Jet<Gauss>;
template class Jet<Complex>;

// ---------------------------------------------------------------- evaluator

template <class S>
JetEvaluator<S>::JetEvaluator(PointSample p, int order) : p_(std::move(p)), order_(order) {
    if (order < 0 || order > jet::kDegree) throw InvalidParams("jet order must be 0..4");
}

namespace {

template <class S>
struct TrueValues;

template <>
struct TrueValues<Gauss> {
    static constexpr bool exact = true;
};
template <>
struct TrueValues<Complex> {
    static constexpr bool exact = false;
};

}  // namespace

template <class S>
const Jet<S>& JetEvaluator<S>::var_jet(VarId v) {
    if (auto it = vars_.find(v); it != vars_.end()) return it->second;
    constexpr bool exact = TrueValues<S>::exact;
    auto& reg = Registry::instance();
    Jet<S> j;
    const double x1 = p_.x[0].get_d(), x2 = p_.x[1].get_d(), x3 = p_.x[2].get_d();
    if (Registry::is_coord(v)) {
        j = Jet<S>::coordinate(from_q<S>(p_.x[static_cast<std::size_t>(v)]), static_cast<int>(v), order_);
    } else if (v == var::r || v == var::rt) {
        Jet<S> sq = Jet<S>::constant(S(0), order_);
        const int n = v == var::r ? 3 : 2;
        for (int a = 0; a < n; ++a) sq += var_jet(static_cast<VarId>(a)) * var_jet(static_cast<VarId>(a));
        S root;
        if constexpr (exact) root = Gauss(v == var::r ? p_.r() : p_.rt());
        else root = S(std::sqrt(v == var::r ? x1 * x1 + x2 * x2 + x3 * x3 : x1 * x1 + x2 * x2));
        j = sq.sqrt_with(root);
    } else if (v == var::phi || v == var::theta || v == var::lrt) {
        S value;
        if constexpr (exact) {
            value = Gauss(p_.surrogate(v));
        } else if (p_.float_uses_surrogates) {
            value = S(p_.surrogate(v).get_d());
        } else {
            const double rt = std::sqrt(x1 * x1 + x2 * x2);
            value = S(v == var::phi ? std::atan2(x2, x1) : v == var::theta ? std::atan2(rt, x3) : std::log(rt));
        }
        std::array<Jet<S>, 3> g;
        for (int a = 0; a < 3; ++a) g[static_cast<std::size_t>(a)] = jet_of(generator_gradient(v)[static_cast<std::size_t>(a)]);
        j = Jet<S>::integrate(value, g);
    } else if (reg.kind(v) == VarKind::Param) {
        if constexpr (exact) {
            j = Jet<S>::constant(Gauss(p_.surrogate(v)), order_);
        } else {
            auto it = p_.float_values.find(reg.name(v));
            j = Jet<S>::constant(it != p_.float_values.end() ? S(it->second) : S(p_.surrogate(v).get_d()), order_);
        }
    } else if (reg.kind(v) == VarKind::Exp) {
        const ExpGenerator* g = exp_generator(v);
        if (!g) throw UnsupportedExpression("exponential generator without data");
        Jet<S> e = Jet<S>::constant(S(0), order_);
        for (const auto& [c, base] : g->exponent) e += jet_of(c) * var_jet(base);
        S value;
        if constexpr (exact) value = Gauss(p_.surrogate(v));
        else if (p_.float_uses_surrogates) value = S(p_.surrogate(v).get_d());
        else value = std::exp(e.value());
        j = e.exp_with(value);
    } else {
        throw UnsupportedExpression("no jet rule for '" + reg.name(v) + "'");
    }
    return vars_.emplace(v, std::move(j)).first->second;
}

template <class S>
Jet<S> JetEvaluator<S>::poly_jet(const Poly& p) {
    Jet<S> out = Jet<S>::constant(S(0), order_);
    for (const auto& t : p.terms()) {
        Jet<S> term = Jet<S>::constant(from_gauss<S>(t.c), order_);
        const std::uint64_t sup = t.m.support();
        for (VarId v = 0; v < kMaxVars; ++v) {
            if (!((sup >> v) & 1u)) continue;
            const int e = t.m.exp(v);
            auto key = std::make_pair(v, e);
            auto it = powers_.find(key);
            if (it == powers_.end()) it = powers_.emplace(key, var_jet(v).pow(e)).first;
            term = term * it->second;
        }
        out += term;
    }
    return out;
}

template <class S>
const Jet<S>& JetEvaluator<S>::factor_jet(std::uint32_t id) {
    if (auto it = factors_.find(id); it != factors_.end()) return it->second;
    Jet<S> j = poly_jet(factor_poly(id)).reciprocal();
    return factors_.emplace(id, std::move(j)).first->second;
}

template <class S>
Jet<S> JetEvaluator<S>::jet_of(const Expr& e) {
    Jet<S> out = poly_jet(e.num());
    for (const auto& f : e.den()) out = out * factor_jet(f.id).pow(f.exp);
    return out;
}

template class JetEvaluator<Gauss>;
template class JetEvaluator<Complex>;

Jet<Gauss> jet_of(const Expr& e, const PointSample& p) {
    JetEvaluator<Gauss> ev(p);
    return ev.jet_of(e);
}

Jet<Complex> jet_of_float(const Expr& e, const PointSample& p) {
    JetEvaluator<Complex> ev(p);
    return ev.jet_of(e);
}

Gauss value_at(const Expr& e, const PointSample& p) {
    std::vector<Gauss> values(kMaxVars);
    const std::uint64_t sup = e.support();
    std::uint64_t mask = 0;
    for (VarId v = 0; v < kMaxVars; ++v) {
        if (!((sup >> v) & 1u)) continue;
        mask |= std::uint64_t{1} << v;
        if (Registry::is_coord(v)) values[static_cast<std::size_t>(v)] = Gauss(p.x[static_cast<std::size_t>(v)]);
        else if (v == var::r) values[static_cast<std::size_t>(v)] = Gauss(p.r());
        else if (v == var::rt) values[static_cast<std::size_t>(v)] = Gauss(p.rt());
        else values[static_cast<std::size_t>(v)] = Gauss(p.surrogate(v));
    }
    try {
        return evaluate(e, values, mask);
    } catch (const DivisionByZero&) {
        throw PoleAtPoint("pole at " + p.str());
    }
}

// ---------------------------------------------------------------- commutator coefficients

namespace {

long binom_multi(const MultiIndex& a, const MultiIndex& g) {
    long c = 1;
    for (int k = 0; k < 3; ++k) {
        const int n = a[static_cast<std::size_t>(k)], m = g[static_cast<std::size_t>(k)];
        long b = 1;
        for (int t = 1; t <= m; ++t) b = b * (n - m + t) / t;
        c *= b;
    }
    return c;
}

template <class S>
std::vector<Jet<S>> coefficient_jets(const DiffOp& op, JetEvaluator<S>& ev, std::vector<bool>& present) {
    std::vector<Jet<S>> out(DiffOp::kSlots);
    present.assign(DiffOp::kSlots, false);
    for (int s = 0; s < DiffOp::kSlots; ++s) {
        if (op.coeff_at(s).is_zero()) continue;
        present[static_cast<std::size_t>(s)] = true;
        out[static_cast<std::size_t>(s)] = ev.jet_of(op.coeff_at(s));
    }
    return out;
}

template <class S>
void add_product(const std::vector<Jet<S>>& a, const std::vector<bool>& pa, const std::vector<Jet<S>>& b,
                 const std::vector<bool>& pb, const S& sign, std::vector<S>& out) {
    for (int sa = 0; sa < DiffOp::kSlots; ++sa) {
        if (!pa[static_cast<std::size_t>(sa)]) continue;
        const MultiIndex& al = DiffOp::index(sa);
        const S a0 = a[static_cast<std::size_t>(sa)].value();
        for (int sb = 0; sb < DiffOp::kSlots; ++sb) {
            if (!pb[static_cast<std::size_t>(sb)]) continue;
            const MultiIndex& be = DiffOp::index(sb);
            for (int g0 = 0; g0 <= al[0]; ++g0)
                for (int g1 = 0; g1 <= al[1]; ++g1)
                    for (int g2 = 0; g2 <= al[2]; ++g2) {
                        const MultiIndex ga{g0, g1, g2};
                        const MultiIndex d{al[0] - g0 + be[0], al[1] - g1 + be[1], al[2] - g2 + be[2]};
                        if (d[0] + d[1] + d[2] > DiffOp::kMaxOrder)
                            throw OrderLimit("pointwise composition exceeds order 4");
                        const S term = S(binom_multi(al, ga)) * b[static_cast<std::size_t>(sb)].derivative(ga);
                        out[static_cast<std::size_t>(DiffOp::slot(d))] += sign * a0 * term;
                    }
        }
    }
}

}  // namespace

template <class S>
std::vector<S> product_coeffs_at(const DiffOp& A, const DiffOp& B, JetEvaluator<S>& ev) {
    std::vector<bool> pa, pb;
    const auto ja = coefficient_jets(A, ev, pa);
    const auto jb = coefficient_jets(B, ev, pb);
    std::vector<S> out(DiffOp::kSlots, S(0));
    add_product(ja, pa, jb, pb, S(1), out);
    return out;
}

template <class S>
std::vector<S> commutator_coeffs_at(const DiffOp& A, const DiffOp& B, JetEvaluator<S>& ev) {
    std::vector<bool> pa, pb;
    const auto ja = coefficient_jets(A, ev, pa);
    const auto jb = coefficient_jets(B, ev, pb);
    std::vector<S> out(DiffOp::kSlots, S(0));
    add_product(ja, pa, jb, pb, S(1), out);
    add_product(jb, pb, ja, pa, S(-1), out);
    return out;
}

template std::vector<Gauss> product_coeffs_at(const DiffOp&, const DiffOp&, JetEvaluator<Gauss>&);
template std::vector<Complex> product_coeffs_at(const DiffOp&, const DiffOp&, JetEvaluator<Complex>&);
template std::vector<Gauss> commutator_coeffs_at(const DiffOp&, const DiffOp&, JetEvaluator<Gauss>&);
template std::vector<Complex> commutator_coeffs_at(const DiffOp&, const DiffOp&, JetEvaluator<Complex>&);

// ---------------------------------------------------------------- residual suite

namespace {

std::string slot_name(int s) {
    const auto& m = DiffOp::index(s);
    return "d[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2]) + "]";
}

mpq_class gauss_mag(const Gauss& g) {
    return std::max(abs(g.re()), abs(g.im()));
}

}  // namespace

OracleResult residual_suite(const DiffOp& H, const DiffOp& Q, int n_points, OraclePath path, std::uint64_t salt,
                            const std::map<std::string, double>& float_values) {
    if (n_points < 1) throw InvalidParams("n_points must be positive");
    OracleResult res;
    res.path = path;
    static const std::array<std::pair<long, long>, 6> scales = {{{1, 1}, {3, 5}, {5, 7}, {7, 9}, {9, 11}, {11, 13}}};
    for (PointSample base : sample_points(n_points, salt)) {
        base.float_values = float_values;
        bool done = false;
        for (const auto& [n, d] : scales) {
            PointSample p = base;
            for (auto& c : p.x) c *= mpq_class(n, d);
            try {
                const int order = std::max({H.order(), Q.order(), 0});
                if (path == OraclePath::Exact) {
                    JetEvaluator<Gauss> ev(p, order);
                    const auto c = commutator_coeffs_at(H, Q, ev);
                    for (int s = 0; s < DiffOp::kSlots; ++s) {
                        const mpq_class m = gauss_mag(c[static_cast<std::size_t>(s)]);
                        if (m > res.exact_max) res.exact_max = m;
                        if (m != 0 && res.nonzero.size() < 8)
                            res.nonzero.push_back({p.str(), slot_name(s), c[static_cast<std::size_t>(s)].str()});
                    }
                } else {
                    JetEvaluator<Complex> ev(p, order);
                    const auto c = commutator_coeffs_at(H, Q, ev);
                    const auto hq = product_coeffs_at(H, Q, ev);
                    double scale = 0;
                    for (const auto& v : hq) scale = std::max(scale, std::abs(v));
                    if (scale == 0) scale = 1;
                    for (int s = 0; s < DiffOp::kSlots; ++s) {
                        const double m = std::abs(c[static_cast<std::size_t>(s)]) / scale;
                        if (!std::isfinite(m)) throw PoleAtPoint("non-finite value");
                        res.float_max = std::max(res.float_max, m);
                        if (m > 1e-10 && res.nonzero.size() < 8) {
                            std::ostringstream os;
                            os << c[static_cast<std::size_t>(s)];
                            res.nonzero.push_back({p.str(), slot_name(s), os.str()});
                        }
                    }
                }
                done = true;
            } catch (const PoleAtPoint&) {
            } catch (const DivisionByZero&) {
            }
            if (done) break;
        }
        if (!done) throw SamplingExhausted("no valid sample near " + base.str());
        ++res.points_used;
    }
    return res;
}

}  // namespace pdm
