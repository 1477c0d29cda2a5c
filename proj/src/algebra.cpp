#include "pdm/algebra.hpp"

#include "pdm/errors.hpp"
#include "pdm/linalg.hpp"

#include <array>
#include <functional>

namespace pdm {

namespace {

const std::array<Gen, 3> kP = {Gen::P1, Gen::P2, Gen::P3};
const std::array<Gen, 3> kL = {Gen::L1, Gen::L2, Gen::L3};
const std::array<Gen, 3> kK = {Gen::K1, Gen::K2, Gen::K3};

DiffOp G(Gen g) { return realize_generator(g); }

int eps(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    return ((b - a + 3) % 3 == 1) ? 1 : -1;  // cyclic (0,1,2) -> +1
}

Expr xc(int a) { return Expr::x(a + 1); }

Expr r2() { return xc(0) * xc(0) + xc(1) * xc(1) + xc(2) * xc(2); }

std::string truncated(std::string s, std::size_t n = 300) {
    if (s.size() > n) s = s.substr(0, n) + " ...";
    return s;
}

}  // namespace

DiffOp pgp(const Expr& g) {
    SymMatrix m{};
    for (int a = 0; a < 3; ++a) m[a][a] = g;
    return from_second_order(m, Expr(0));
}

IdentityResult check_identity(const std::string& name, const DiffOp& lhs, const DiffOp& rhs) {
    IdentityResult r;
    r.name = name;
    const DiffOp d = lhs - rhs;
    r.holds = d.is_zero();
    if (!r.holds) {
        r.constant_offset = d.order() == 0 && d.coeff_at(DiffOp::slot({0, 0, 0})).is_constant();
        r.residual = truncated(d.str());
    }
    return r;
}

std::vector<IdentityResult> verify_identities() {
    std::vector<IdentityResult> out;
    auto add = [&](const std::string& name, const std::string& inst, const DiffOp& l, const DiffOp& r) {
        IdentityResult res = check_identity(name, l, r);
        res.instance = inst;
        out.push_back(std::move(res));
    };
    const DiffOp D = G(Gen::D);
    // {P_a,D} + eps_abc {P_b,L_c} = 2 P_c x_a P_c
    for (int a = 0; a < 3; ++a) {
        DiffOp lhs = anticommutator(G(kP[a]), D);
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                if (int e = eps(a, b, c)) lhs += Expr(e) * anticommutator(G(kP[b]), G(kL[c]));
        add("{P_a,D} + eps_abc {P_b,L_c} = 2 P_c x_a P_c", "a=" + std::to_string(a + 1), lhs,
            Expr(2) * pgp(xc(a)));
    }
    // {L_a,L_b} + {P_a,K_b} = 2 P_c x_a x_b P_c, a != b
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            add("{L_a,L_b} + {P_a,K_b} = 2 Q^ab (a != b)",
                "a=" + std::to_string(a + 1) + ",b=" + std::to_string(b + 1),
                anticommutator(G(kL[a]), G(kL[b])) + anticommutator(G(kP[a]), G(kK[b])),
                Expr(2) * pgp(xc(a) * xc(b)));
        }
    // {P1,K1} + {P2,K2} + L3^2 = 2 Q^33
    add("{P_1,K_1} + {P_2,K_2} + L_3^2 = 2 Q^33", "",
        anticommutator(G(Gen::P1), G(Gen::K1)) + anticommutator(G(Gen::P2), G(Gen::K2)) +
            compose(G(Gen::L3), G(Gen::L3)),
        Expr(2) * pgp(xc(2) * xc(2)));
    // {K_al,P_al} + 2 L3^2 + 2 D^2 = 2 P_a (r^2 - x_al^2) P_a, no sum over al
    for (int al = 0; al < 3; ++al)
        add("{K_al,P_al} + 2L_3^2 + 2D^2 = 2 P_a (r^2 - x_al^2) P_a", "al=" + std::to_string(al + 1),
            anticommutator(G(kK[al]), G(kP[al])) + Expr(2) * compose(G(Gen::L3), G(Gen::L3)) +
                Expr(2) * compose(D, D),
            Expr(2) * pgp(r2() - xc(al) * xc(al)));
    // P_a L_a = 0
    {
        DiffOp lhs;
        for (int a = 0; a < 3; ++a) lhs += compose(G(kP[a]), G(kL[a]));
        add("P_a L_a = 0", "", lhs, DiffOp());
    }
    // {P_a,K_a} = -4 D^2 + 2 P_a r^2 P_a
    {
        DiffOp lhs;
        for (int a = 0; a < 3; ++a) lhs += anticommutator(G(kP[a]), G(kK[a]));
        add("{P_a,K_a} = -4D^2 + 2 P_a r^2 P_a", "", lhs, Expr(-4) * compose(D, D) + Expr(2) * pgp(r2()));
    }
    // L1^2 + L2^2 + L3^2 = P_a r^2 P_a - D^2
    {
        DiffOp lhs;
        for (int a = 0; a < 3; ++a) lhs += compose(G(kL[a]), G(kL[a]));
        add("L_1^2 + L_2^2 + L_3^2 = P_a r^2 P_a - D^2", "", lhs, pgp(r2()) - compose(D, D));
    }
    // {P_a,K_b} - {P_b,K_a} = 2 eps_abc L_c D
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            DiffOp rhs;
            for (int c = 0; c < 3; ++c)
                if (int e = eps(a, b, c)) rhs += Expr(2 * e) * compose(G(kL[c]), D);
            add("{P_a,K_b} - {P_b,K_a} = 2 eps_abc L_c D",
                "a=" + std::to_string(a + 1) + ",b=" + std::to_string(b + 1),
                anticommutator(G(kP[a]), G(kK[b])) - anticommutator(G(kP[b]), G(kK[a])), rhs);
        }
    // P1^2 + P2^2 = -P3^2 + P_a P_a
    {
        DiffOp papa;
        for (int a = 0; a < 3; ++a) papa += compose(G(kP[a]), G(kP[a]));
        add("P_1^2 + P_2^2 = -P_3^2 + P_a P_a", "",
            compose(G(Gen::P1), G(Gen::P1)) + compose(G(Gen::P2), G(Gen::P2)),
            papa - compose(G(Gen::P3), G(Gen::P3)));
    }
    return out;
}

std::vector<IdentityResult> verify_identity_repairs() {
    std::vector<IdentityResult> out;
    auto add = [&](const std::string& name, const std::string& inst, const DiffOp& l, const DiffOp& r) {
        IdentityResult res = check_identity(name, l, r);
        res.instance = inst;
        out.push_back(std::move(res));
    };
    const DiffOp D = G(Gen::D);
    const DiffOp D2 = compose(D, D);
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const std::string inst = "a=" + std::to_string(a + 1) + ",b=" + std::to_string(b + 1);
            add("{L_a,L_b} + ({P_a,K_b} + {P_b,K_a})/2 = -2 Q^ab (a != b)", inst,
                anticommutator(G(kL[a]), G(kL[b])) +
                    Expr::rational(1, 2) *
                        (anticommutator(G(kP[a]), G(kK[b])) + anticommutator(G(kP[b]), G(kK[a]))),
                Expr(-2) * pgp(xc(a) * xc(b)));
            DiffOp rhs;
            for (int c = 0; c < 3; ++c)
                if (int e = eps(a, b, c)) rhs += Expr(4 * e) * compose(G(kL[c]), D);
            add("{P_a,K_b} - {P_b,K_a} = 4 eps_abc L_c D", inst,
                anticommutator(G(kP[a]), G(kK[b])) - anticommutator(G(kP[b]), G(kK[a])), rhs);
        }
    add("{P_1,K_1} + {P_2,K_2} = 2L_3^2 - 2D^2 + 2 Q^33 + 3/2", "",
        anticommutator(G(Gen::P1), G(Gen::K1)) + anticommutator(G(Gen::P2), G(Gen::K2)),
        Expr(2) * compose(G(Gen::L3), G(Gen::L3)) - Expr(2) * D2 + Expr(2) * pgp(xc(2) * xc(2)) +
            DiffOp::multiplication(Expr::rational(3, 2)));
    for (int al = 0; al < 3; ++al)
        add("{K_al,P_al} + 2L_al^2 + 2D^2 = 2 P_a (r^2 - x_al^2) P_a - 3/2", "al=" + std::to_string(al + 1),
            anticommutator(G(kK[al]), G(kP[al])) + Expr(2) * compose(G(kL[al]), G(kL[al])) + Expr(2) * D2,
            Expr(2) * pgp(r2() - xc(al) * xc(al)) - DiffOp::multiplication(Expr::rational(3, 2)));
    {
        DiffOp lhs;
        for (int a = 0; a < 3; ++a) lhs += compose(G(kL[a]), G(kL[a]));
        add("L_1^2 + L_2^2 + L_3^2 = P_a r^2 P_a - D^2 - 9/4", "", lhs,
            pgp(r2()) - D2 - DiffOp::multiplication(Expr::rational(9, 4)));
    }
    return out;
}

// ---------------------------------------------------------------- closure

namespace {

ClosureResult closure_in(const std::vector<DiffOp>& basis, const std::vector<std::string>& names) {
    ClosureResult r;
    r.names = names;
    const std::size_t n = basis.size();
    r.table.assign(n, std::vector<std::vector<Gauss>>(n, std::vector<Gauss>(n, Gauss(0))));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const DiffOp c = commutator(basis[i], basis[j]);
            auto coeffs = span_coefficients(c, basis);
            if (!coeffs) {
                r.closed = false;
                r.failures.push_back("[" + names[i] + "," + names[j] + "]");
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                r.table[i][j][k] = (*coeffs)[k];
                r.table[j][i][k] = -(*coeffs)[k];
            }
        }
    return r;
}

}  // namespace

ClosureResult closure_c3() {
    std::vector<DiffOp> basis;
    std::vector<std::string> names;
    for (Gen g : kAllGens) {
        basis.push_back(G(g));
        names.push_back(gen_name(g));
    }
    return closure_in(basis, names);
}

std::vector<DiffOp> so14_basis(std::vector<std::string>* names) {
    std::vector<DiffOp> b;
    std::vector<std::string> n;
    for (int a = 0; a < 3; ++a)
        for (int c = a + 1; c < 3; ++c) {
            DiffOp s;
            for (int k = 0; k < 3; ++k)
                if (int e = eps(a, c, k)) s += Expr(e) * G(kL[k]);
            b.push_back(s);
            n.push_back("S" + std::to_string(a + 1) + std::to_string(c + 1));
        }
    for (int a = 0; a < 3; ++a) {
        b.push_back(Expr::rational(1, 2) * (G(kK[a]) - G(kP[a])));
        n.push_back("S4" + std::to_string(a + 1));
    }
    for (int a = 0; a < 3; ++a) {
        b.push_back(Expr::rational(1, 2) * (G(kK[a]) + G(kP[a])));
        n.push_back("S0" + std::to_string(a + 1));
    }
    b.push_back(G(Gen::D));
    n.push_back("S04");
    if (names) *names = n;
    return b;
}

ClosureResult closure_so14() {
    std::vector<std::string> names;
    auto basis = so14_basis(&names);
    return closure_in(basis, names);
}

// ---------------------------------------------------------------- inversion

DiffOp inversion_transform(const DiffOp& op, int weight) {
    for (int s = 0; s < DiffOp::kSlots; ++s) {
        const Expr& c = op.coeff_at(s);
        if (c.is_zero()) continue;
        if (c.uses(var::lrt)) throw UnsupportedExpression("inversion of ln(rt) leaves the coefficient field");
        for (VarId v = var::kBuiltins; v < Registry::instance().size(); ++v)
            if (c.uses(v) && Registry::instance().kind(v) != VarKind::Param)
                throw UnsupportedExpression("inversion of a user generator is not supported");
    }
    const Expr r = Expr::r();
    const Expr inv_r2 = Expr(1) / (r * r);
    const Bindings inversion{{var::x1, Expr::x(1) * inv_r2}, {var::x2, Expr::x(2) * inv_r2},
                             {var::x3, Expr::x(3) * inv_r2}, {var::r, Expr(1) / r},
                             {var::rt, Expr::rt() * inv_r2}};
    const int order = std::max(op.order(), 0);
    // B = T A T is fixed by its action on the monomials x^beta, |beta| <= order:
    // B(x^beta)(x) = r^w [A u_beta](x / r^2) with u_beta(y) = |y|^(w - 2|beta|) y^beta.
    DiffOp out;
    std::vector<int> slots;
    for (int s = 0; s < DiffOp::kSlots; ++s)
        if (DiffOp::order_of(s) <= order) slots.push_back(s);
    std::sort(slots.begin(), slots.end(), [](int a, int b) { return DiffOp::order_of(a) < DiffOp::order_of(b); });
    for (int s : slots) {
        const MultiIndex& beta = DiffOp::index(s);
        const int n = beta[0] + beta[1] + beta[2];
        Expr mono(1);
        for (int a = 0; a < 3; ++a) mono *= Expr::x(a + 1).pow(beta[a]);
        const Expr u = r.pow(weight - 2 * n) * mono;
        const Expr image = r.pow(weight) * substitute(op.apply(u), inversion);
        // subtract contributions of lower slots already determined
        Expr rest = image - out.apply(mono);
        long fact = 1;
        for (int a = 0; a < 3; ++a)
            for (int k = 2; k <= beta[a]; ++k) fact *= k;
        out.set(beta, rest / Expr(fact));
    }
    return out;
}

std::vector<InversionResult> verify_inversion(int weight) {
    std::vector<InversionResult> out;
    std::vector<DiffOp> basis;
    for (Gen g : kAllGens) basis.push_back(G(g));
    for (Gen g : kAllGens) {
        InversionResult res;
        res.generator = gen_name(g);
        const DiffOp img = inversion_transform(G(g), weight);
        res.involution = inversion_transform(img, weight) == G(g);
        auto c = span_coefficients(img, basis);
        Gen expected = g;
        for (int a = 0; a < 3; ++a) {
            if (g == kP[a]) expected = kK[a];
            if (g == kK[a]) expected = kP[a];
        }
        if (!c) {
            res.image = "not a generator combination";
        } else {
            std::string s;
            for (std::size_t k = 0; k < basis.size(); ++k) {
                if ((*c)[k].is_zero()) continue;
                const Gauss& v = (*c)[k];
                std::string coef = v.is_one() ? "" : (v == Gauss(-1) ? "-" : v.str(true) + "*");
                s += (s.empty() || coef.rfind('-', 0) == 0 ? "" : " + ") + coef + gen_name(kAllGens[k]);
            }
            res.image = s.empty() ? "0" : s;
            res.matches_printed = img == G(expected);
        }
        out.push_back(res);
    }
    return out;
}

// ---------------------------------------------------------------- families

namespace {

struct FamilyForm {
    std::string name;
    std::function<Expr()> argument;
    std::function<Expr(const Expr&)> f_of;  // f from F value
    std::vector<std::string> generators;
};

Expr lrt_arg() { return Expr(2) * Expr::lrt() + Expr::phi(); }

const std::vector<FamilyForm>& family_forms() {
    static const std::vector<FamilyForm> forms = [] {
        const Expr rt2 = Expr::rt() * Expr::rt();
        std::vector<FamilyForm> v;
        v.push_back({"fV1", [] { return Expr::rt(); }, [](const Expr& F) { return F; }, {"L3", "P3"}});
        v.push_back({"fV2", [] { return Expr::theta(); }, [rt2](const Expr& F) { return rt2 * F; }, {"L3", "D"}});
        v.push_back({"fV3", [] { return (Expr::r() * Expr::r() + Expr(1)) / Expr::rt(); },
                     [rt2](const Expr& F) { return rt2 * F; }, {"P3 - K3", "L3"}});
        // argument a*ln(rt) + phi with a = 2; the listed D + nu*L3 uses nu = -a
        v.push_back({"fV41", lrt_arg, [rt2](const Expr& F) { return rt2 * F; }, {"P3", "D - 2*L3"}});
        v.push_back({"fV5", [] { return Expr::phi(); }, [rt2](const Expr& F) { return rt2 * F; }, {"P3", "D"}});
        v.push_back({"fV6", [] { return Expr::x(3); }, [](const Expr& F) { return F; }, {"P1", "P2"}});
        return v;
    }();
    return forms;
}

const FamilyForm& family_form(const std::string& name) {
    for (const auto& f : family_forms())
        if (f.name == name) return f;
    throw UnknownSymbol("unknown family '" + name + "'");
}

}  // namespace

std::pair<Expr, Expr> family_sample(const std::string& family, int k) {
    const auto& form = family_form(family);
    const Expr s = form.argument();
    Expr F, Gv;
    switch (k % 3) {
        case 0:
            F = Expr(1) + s * s;
            Gv = s;
            break;
        case 1:
            F = Expr(2) + s;
            Gv = Expr(1) + s * s;
            break;
        default:
            F = Expr(3) - s + s * s * s;
            Gv = Expr(1) / (Expr(2) + s * s);
            break;
    }
    return {form.f_of(F), Gv};
}

std::vector<std::string> family_generators(const std::string& family) { return family_form(family).generators; }

std::vector<FamilyLieResult> family_lie_checks(int instances) {
    std::vector<FamilyLieResult> out;
    for (const auto& form : family_forms())
        for (int k = 0; k < instances; ++k) {
            const auto [f, V] = family_sample(form.name, k);
            const DiffOp H = hamiltonian(f, V);
            for (const auto& g : form.generators) {
                FamilyLieResult r;
                r.family = form.name;
                r.instance = "F,G sample " + std::to_string(k);
                r.generator = g;
                const DiffOp c = commutator(H, realize(parse_gencomb(g)));
                r.commutes = c.is_zero();
                if (!r.commutes) r.residual = truncated(c.str(), 200);
                out.push_back(r);
            }
        }
    return out;
}

// ---------------------------------------------------------------- decoupling

std::vector<DecouplingResult> l3_decoupling(const SystemInstance& s) {
    std::vector<DecouplingResult> out;
    const DiffOp H = hamiltonian(s.f, s.V);
    const DiffOp L3 = G(Gen::L3);
    const bool commutes = commutator(L3, H).is_zero();
    std::vector<DiffOp> span;
    for (const auto& q : s.integrals) span.push_back(realize(q, s.f, s.V));
    span.push_back(H);
    span.push_back(DiffOp::identity());
    std::vector<DiffOp> lie;
    for (const auto& g : s.lie) lie.push_back(realize(g));
    for (std::size_t i = 0; i < lie.size(); ++i) {
        span.push_back(lie[i]);
        for (std::size_t j = i; j < lie.size(); ++j) span.push_back(anticommutator(lie[i], lie[j]));
    }
    for (const auto& q : s.integrals) {
        DecouplingResult r;
        r.label = q.label;
        r.l3_commutes_with_h = commutes;
        r.in_span = span_coefficients(commutator(L3, realize(q, s.f, s.V)), span).has_value();
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- reports

nlohmann::json to_json(const std::vector<IdentityResult>& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& x : r) {
        nlohmann::json e = {{"identity", x.name}, {"instance", x.instance}, {"holds", x.holds}};
        if (!x.holds) {
            e["constant_offset"] = x.constant_offset;
            e["residual"] = x.residual;
        }
        j.push_back(e);
    }
    return j;
}

nlohmann::json to_json(const ClosureResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        for (std::size_t j = i + 1; j < r.names.size(); ++j) {
            nlohmann::json terms = nlohmann::json::object();
            for (std::size_t k = 0; k < r.names.size(); ++k)
                if (!r.table[i][j][k].is_zero()) terms[r.names[k]] = r.table[i][j][k].str();
            rows.push_back({{"pair", "[" + r.names[i] + "," + r.names[j] + "]"}, {"combination", terms}});
        }
    return {{"closed", r.closed}, {"structure_constants", rows}, {"failures", r.failures}};
}

nlohmann::json to_json(const std::vector<InversionResult>& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& x : r)
        j.push_back({{"generator", x.generator}, {"image", x.image},
                     {"matches_printed", x.matches_printed}, {"involution", x.involution}});
    return j;
}

nlohmann::json to_json(const std::vector<FamilyLieResult>& r) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& x : r) {
        nlohmann::json e = {{"family", x.family}, {"instance", x.instance},
                            {"generator", x.generator}, {"commutes", x.commutes}};
        if (!x.commutes) e["residual"] = x.residual;
        j.push_back(e);
    }
    return j;
}

}  // namespace pdm
