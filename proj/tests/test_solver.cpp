#include "doctest.h"

#include "pdm/errors.hpp"
#include "pdm/solver.hpp"

using namespace pdm;

namespace {

Expr P(const char* s) { return parse_expr(s, {}); }

SystemInstance instance_of(const std::string& id, std::uint64_t seed = 7) {
    const CatalogEntry& e = catalog_entry(id);
    std::mt19937_64 rng(seed);
    return instantiate(e, random_binding(e, binding_skeletons(e).front(), rng));
}

Mat3 diag(long a, long b, long c) {
    Mat3 m{};
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    return m;
}

bool homogeneous(const Expr& g, int n) {
    Expr e;
    for (int a = 1; a <= 3; ++a) e += Expr::x(a) * differentiate(g, a);
    return e == Expr(n) * g;
}

}  // namespace

TEST_CASE("build_M: K0-form is the constant tensor") {
    KillingParams p = KillingParams::only(1);
    p.lambda1 = diag(1, 1, -2);
    const MMatrix M = build_M(p, MVariant::K0);
    CHECK(M.entries[0][0] == Expr(1));
    CHECK(M.entries[2][2] == Expr(-2));
    CHECK(M.entries[0][1] == Expr());
    CHECK(det_condition(M) == Expr(-2));
}

TEST_CASE("build_M: K1-form without vectors is the tensor itself") {
    KillingParams p = KillingParams::only(3);
    p.lambda3 = diag(1, -1, 0);
    const MMatrix M = build_M(p, MVariant::K1);
    const KillingTensor mu = build(p);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(M.entries[a][b] == mu[a][b]);
}

TEST_CASE("build_M: K2-form with a rank-deficient lambda has zero determinant") {
    KillingParams p = KillingParams::only(6, KillingVariant::Corrected);
    p.lambda6 = diag(1, -1, 0);
    p.lambda5 = p.lambda6;
    const MMatrix M = build_M(p, MVariant::K2);
    // M^{ab} = mu^{ab} - lambda^{ac} x_c x_b
    const KillingTensor mu = build(p);
    CHECK(M.entries[0][1] == mu[0][1] - Expr::x(1) * Expr::x(2));
    CHECK(M.entries[2][0] == mu[2][0]);
}

TEST_CASE("build_M: inconsistent variant") {
    KillingParams p = KillingParams::only(1);
    p.lambda1 = diag(1, 0, -1);
    CHECK_THROWS_AS(build_M(p, MVariant::K2), InvalidVariant);
    KillingParams q = KillingParams::only(7);
    q.lambda7 = {1, 0, 0};
    CHECK_THROWS_AS(build_M(q, MVariant::K1), InvalidVariant);
}

TEST_CASE("det_condition: identity and singular diagonal") {
    MMatrix I;
    for (int a = 0; a < 3; ++a) I.entries[a][a] = Expr(1);
    CHECK(det_condition(I) == Expr(1));
    MMatrix D;
    D.entries[0][0] = Expr::param("lambda");
    D.entries[1][1] = Expr::param("mu");
    CHECK(det_condition(D).is_zero());
}

TEST_CASE("recover_g: homogeneity precondition") {
    MMatrix I;
    for (int a = 0; a < 3; ++a) I.entries[a][a] = Expr(1);
    CHECK_NOTHROW(recover_g(P("rt^2"), I));
    CHECK_THROWS_AS(recover_g(Expr::x(3), I), NotDilatationInvariant);
}

TEST_CASE("recover_g: outputs are homogeneous of the class degree") {
    const Expr f = P("x3^2*rt^2/(3*rt^2 + 7*x3^2)");
    std::mt19937_64 rng(4);
    for (int k = 0; k < 5; ++k) {
        KillingParams p0 = KillingParams::only(1);
        p0.lambda1 = random_traceless(rng);
        const GRecovery g0 = recover_g(f, build_M(p0, MVariant::K0));
        CHECK(g0.homogeneity_ok);
        CHECK(homogeneous(g0.g, 0));
        KillingParams p1 = KillingParams::only(2);
        p1.lambda2 = random_vector(rng);
        p1.mu2_trace_vector = random_vector(rng);
        const GRecovery g1 = recover_g(f, build_M(p1, MVariant::K1));
        CHECK(g1.homogeneity_ok);
        CHECK(homogeneous(g1.g, 1));
        CHECK(g1.reading == "g = -x_a M^{ab} f_b / f");
    }
}

TEST_CASE("recover_g: constant tensor of the P3^2 integral reproduces its trace part") {
    const SystemInstance s = instance_of("T1.3");
    const auto rs = m_reduction(s);
    REQUIRE(rs.size() == 1);
    REQUIRE(rs[0].variant.has_value());
    CHECK(*rs[0].variant == MVariant::K0);
    CHECK(rs[0].g_matches);
}

TEST_CASE("recover_g: L3^2 integral gives g = f G(phi)") {
    const SystemInstance s = instance_of("T1.6");
    const auto form = second_order_form(realize(s.integrals.front(), s.f, s.V));
    REQUIRE(form.has_value());
    const auto params = decompose_killing(form->first);
    REQUIRE(params.has_value());
    CHECK(is_zero(build(*params) + scale(form->first, Expr(-1))));
    const auto rs = m_reduction(s);
    REQUIRE(rs[0].variant.has_value());
    CHECK(*rs[0].variant == MVariant::K2);
    CHECK(rs[0].g_matches);
}

TEST_CASE("decompose_killing: random corrected tensors round-trip") {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 5; ++k) {
        KillingParams p;
        p.variant = KillingVariant::Corrected;
        for (auto& w : p.weights) w = 0;
        const int m = 1 + static_cast<int>(rng() % 9);
        p.weights[static_cast<std::size_t>(m)] = 1;
        randomize_family(p, m, rng);
        p.weights[0] = 1;
        p.g = Expr::x(1) * Expr::x(2);
        const KillingTensor mu = build(p);
        const auto back = decompose_killing(mu);
        REQUIRE(back.has_value());
        CHECK(is_zero(scale(build(*back), Expr(-1)) + mu));
    }
    KillingTensor bad{};
    bad[0][1] = bad[1][0] = Expr::lrt();
    CHECK_FALSE(decompose_killing(bad).has_value());
}

TEST_CASE("families: constructions follow their formulas") {
    const GeneratedPair l = family_L3sq(Expr(1), Expr::phi(), Expr::phi(), Expr());
    CHECK(l.f == P("rt^2/(rt^2 - phi)"));
    CHECK(l.V == P("phi/(phi - rt^2)"));
    const GeneratedPair p = family_P3sq(P("x1^2 + x2^2"), P("x3^2"), Expr(1), Expr::x(3));
    CHECK(p.f == P("1/r^2"));
    CHECK(p.V == P("(1 + x3)/r^2"));
    CHECK_THROWS_AS(family_P3sq(P("x1"), P("-x1"), Expr(), Expr()), DegenerateFamily);
    CHECK_THROWS_AS(family_L3sq(Expr(), Expr(), Expr(), Expr()), DegenerateFamily);
}

TEST_CASE("families: the classical conditions hold for sampled instances") {
    for (const auto& g : sample_P3sq(3, 1)) {
        const PairCheck c = check_pair(g);
        CHECK(c.m1_zero);
        CHECK(c.m2_printed_zero);
    }
    for (const auto& g : sample_L3sq_dilatation(3, 1)) {
        const PairCheck c = check_pair(g);
        CHECK(c.m1_zero);
        CHECK(c.m2_printed_zero);
    }
}

TEST_CASE("families: free particle specialization commutes") {
    const GeneratedPair p = family_P3sq(Expr(1), Expr(), Expr(), Expr());
    const PairCheck c = check_pair(p);
    CHECK(c.commutes);
    const GeneratedPair q = family_P3sq(Expr(-1), Expr(2), Expr(3), Expr(-3));
    CHECK(q.f == Expr(1));
    CHECK(q.V == Expr());
    CHECK(check_pair(q).commutes);
}

TEST_CASE("families: constant G(theta) in the dilatation variant commutes") {
    const GeneratedPair p = family_L3sq_dilatation(P("2 + phi"), Expr(3), Expr(1), Expr::phi());
    CHECK(check_pair(p).commutes);
}

TEST_CASE("ansatz: free particle with two tensors yields both") {
    AnsatzProblem pb;
    pb.f = Expr(1);
    pb.V = Expr();
    for (const IntegralTerm& t :
         {IntegralTerm::bilinear(BilinearForm::Square, GenComb::single(Gen::P3)),
          IntegralTerm::bilinear(BilinearForm::Product, GenComb::single(Gen::P1), GenComb::single(Gen::P2))}) {
        const auto form = second_order_form(realize(t, Expr(1), Expr()));
        REQUIRE(form.has_value());
        pb.tensors.push_back({"t", form->first});
    }
    const AnsatzResult r = ansatz_solve(pb);
    CHECK(r.nullspace_dimension == 2);
    CHECK(r.solutions.size() == 2);
    CHECK(r.rejected == 0);
    for (const auto& s : r.solutions) CHECK(commutator(hamiltonian(Expr(1), Expr()), s.op).is_zero());
}

TEST_CASE("ansatz: underdetermined collocation") {
    AnsatzProblem pb;
    pb.f = Expr(1);
    pb.V = Expr();
    pb.tensors = killing_slot_tensors({1, 2, 3});
    pb.points = 1;
    CHECK_THROWS_AS(ansatz_solve(pb), NeedMorePoints);
    pb.tensors.clear();
    CHECK(ansatz_solve(pb).solutions.empty());
}

TEST_CASE("ansatz: commuting catalog integral is recovered") {
    const CatalogEntry& e = catalog_entry("T1.7");
    const SystemInstance s = instance_of("T1.7");
    const AnsatzResult r = ansatz_solve(ansatz_problem(e, s));
    CHECK(r.rejected == 0);
    CHECK_FALSE(r.solutions.empty());
    const auto rec = recover_printed(s, r);
    REQUIRE(rec.size() == 2);
    CHECK(rec[0].commutes);
    CHECK(rec[0].recovered);
    // A printed integral that does not commute can never be recovered.
    CHECK_FALSE(rec[1].commutes);
    CHECK_FALSE(rec[1].recovered);
}

TEST_CASE("ansatz: seeded verified integral is recovered") {
    const SystemInstance s = instance_of("T2.6");
    AnsatzProblem pb;
    pb.f = s.f;
    pb.V = s.V;
    // The integral decomposes into families 5 and 6 plus (1 - x3^2/rt^2 . H);
    // the scalar left after removing F V needs the lrt and phi pieces.
    pb.tensors = killing_slot_tensors({5, 6});
    pb.fh_dictionary = {Expr(1), P("x3^2/rt^2")};
    pb.eta_dictionary = {Expr(1), Expr::phi(), Expr::lrt(), P("x3^2*phi/rt^2"), P("x3^2*lrt/rt^2")};
    const AnsatzResult r = ansatz_solve(pb);
    CHECK(r.rejected == 0);
    const auto rec = recover_printed(s, r);
    REQUIRE(rec.size() == 1);
    CHECK(rec[0].commutes);
    CHECK(rec[0].recovered);
}

TEST_CASE("shift reduction: free particle closes every candidate") {
    const auto cands = shift_reduction(Expr(1), Expr());
    CHECK(cands.size() == 8);
    for (const auto& c : cands) {
        CHECK_MESSAGE(c.closes, c.name);
        if (c.solution) CHECK(commutator(hamiltonian(Expr(1), Expr()), c.solution->op).is_zero());
    }
    CHECK(cands[2].solution->text == "{P1, D} + (-2*x1 . H)");
}

TEST_CASE("shift reduction: P3 P2 fails for a potential linear in x1") {
    const auto cands = shift_reduction(P("1/x3"), P("x1/x3"));
    for (const auto& c : cands)
        if (c.name == "P3 P2") CHECK_FALSE(c.closes);
}

TEST_CASE("table notation: operators render back exactly") {
    const SystemInstance s = instance_of("T1.6");
    const auto form = second_order_form(realize(s.integrals.front(), s.f, s.V));
    REQUIRE(form.has_value());
    const auto spec = to_integral_spec(form->first, form->second, s.f, s.V);
    REQUIRE(spec.has_value());
    CHECK(realize(*spec, s.f, s.V) == realize(s.integrals.front(), s.f, s.V));
}
