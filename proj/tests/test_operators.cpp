#include "doctest.h"
#include "support.hpp"

#include "pdm/diffop.hpp"
#include "pdm/errors.hpp"

using namespace pdm;

namespace {

DiffOp laplacian() {
    DiffOp d;
    d.set({2, 0, 0}, Expr(1));
    d.set({0, 2, 0}, Expr(1));
    d.set({0, 0, 2}, Expr(1));
    return d;
}

Expr minus_i() { return Expr(Gauss(mpq_class(0), mpq_class(-1))); }

DiffOp random_first_order(std::mt19937_64& rng) {
    DiffOp d = DiffOp::multiplication(testing::random_expr(rng, 1, false));
    for (int a = 1; a <= 3; ++a) d += testing::random_expr(rng, 1, false) * DiffOp::partial(a);
    return d;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("from_second_order realizes p mu p + eta") {
    SymMatrix delta{};
    for (int a = 0; a < 3; ++a) delta[a][a] = Expr(1);
    CHECK(from_second_order(delta, Expr()) == -laplacian());
    SymMatrix m33{};
    m33[2][2] = Expr(1);
    const DiffOp p3 = realize_generator(Gen::P3);
    CHECK(from_second_order(m33, Expr()) == compose(p3, p3));
    SymMatrix dx1{};
    for (int a = 0; a < 3; ++a) dx1[a][a] = Expr::x(1);
    CHECK(from_second_order(dx1, Expr()) == -(Expr::x(1) * laplacian() + DiffOp::partial(1)));
}

TEST_CASE("hamiltonian examples") {
    CHECK(hamiltonian(Expr(1), Expr()) == -laplacian());
    const Expr alpha = Expr::param("alpha");
    const Expr r2 = Expr::r() * Expr::r();
    DiffOp expect = -(r2 * laplacian()) + DiffOp::multiplication(alpha);
    for (int a = 1; a <= 3; ++a) expect -= Expr(2) * Expr::x(a) * DiffOp::partial(a);
    CHECK(hamiltonian(r2, alpha) == expect);
    // T1.1 mass: kinetic coefficients are -f on the diagonal and -f_a
    const Expr f = parse_expr("x3^2*r^2/(mu*r^2 + lambda*x3^2)", {"mu", "lambda"});
    const DiffOp h = hamiltonian(f, Expr());
    CHECK(h.coeff({2, 0, 0}) == -f);
    CHECK(h.coeff({0, 0, 1}) == -differentiate(f, 3));
    CHECK(h.coeff({1, 1, 0}).is_zero());
}

TEST_CASE("compose examples") {
    CHECK(compose(DiffOp::partial(1), DiffOp::multiplication(Expr::x(1))) ==
          Expr::x(1) * DiffOp::partial(1) + DiffOp::identity());
    const Expr f = parse_expr("x1*x2^2/(1 + x3^2)");
    DiffOp expect = f * laplacian();
    Expr lap;
    for (int a = 1; a <= 3; ++a) {
        expect += Expr(2) * differentiate(f, a) * DiffOp::partial(a);
        lap += differentiate(differentiate(f, a), a);
    }
    expect += DiffOp::multiplication(lap);
    CHECK(compose(laplacian(), DiffOp::multiplication(f)) == expect);
    const DiffOp k3 = realize_generator(Gen::K3);
    CHECK(compose(k3, DiffOp::identity()) == k3);
    CHECK_THROWS_AS(compose(compose(laplacian(), laplacian()), DiffOp::partial(1)), OrderLimit);
}

TEST_CASE("commutator examples") {
    const DiffOp d33 = compose(DiffOp::partial(3), DiffOp::partial(3));
    CHECK(commutator(hamiltonian(Expr(1), Expr()), d33).is_zero());
    for (Gen p : {Gen::P1, Gen::P2, Gen::P3}) {
        const DiffOp P = realize_generator(p);
        CHECK(commutator(realize_generator(Gen::D), P) == Expr::i() * P);
    }
}

TEST_CASE("generator realizations") {
    CHECK(realize_generator(Gen::P3) == minus_i() * DiffOp::partial(3));
    CHECK(realize_generator(Gen::L3) ==
          minus_i() * (Expr::x(1) * DiffOp::partial(2) - Expr::x(2) * DiffOp::partial(1)));
    const DiffOp k3 = realize_generator(Gen::K3);
    const Expr x3 = Expr::x(3);
    CHECK(k3.coeff({0, 0, 1}) == minus_i() * (Expr::r() * Expr::r() - Expr(2) * x3 * x3));
    CHECK(k3.coeff({1, 0, 0}) == Expr(2) * Expr::i() * x3 * Expr::x(1));
    CHECK(k3.coeff({0, 0, 0}) == Expr(3) * Expr::i() * x3);
    const DiffOp p3 = realize_generator(Gen::P3);
    CHECK(anticommutator(p3, p3) == Expr(2) * compose(p3, p3));
}

TEST_CASE("anticommutator expansions used by the tables") {
    const DiffOp p3 = realize_generator(Gen::P3), d = realize_generator(Gen::D);
    CHECK(anticommutator(p3, d) == compose(p3, d) + compose(d, p3));
    const DiffOp l1 = realize_generator(Gen::L1), l2 = realize_generator(Gen::L2);
    const DiffOp a = anticommutator(l1, l2);
    CHECK(a.order() == 2);
    // {L1,L2} second-order part: -(x2 x1 d3^2 ...) checked through symmetry
    CHECK(a == anticommutator(l2, l1));
}

TEST_CASE("algebraic properties on random operators") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 8; ++k) {
        const DiffOp a = random_first_order(rng), b = random_first_order(rng), c = random_first_order(rng);
        CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
        CHECK(commutator(a, b) == -commutator(b, a));
        const DiffOp jacobi = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                              commutator(c, commutator(a, b));
        CHECK(jacobi.is_zero());
        const Expr f = testing::random_expr(rng, 2, false);
        const Expr V = testing::random_expr(rng, 1, true);
        if (f.is_zero()) continue;
        const DiffOp h = hamiltonian(f, V);
        CHECK(commutator(h, h).is_zero());
    }
}

TEST_CASE("apply agrees with composition") {
    const DiffOp k1 = realize_generator(Gen::K1), l2 = realize_generator(Gen::L2);
    const Expr psi = parse_expr("x1^2*x2 + x3*r + phi");
    CHECK(compose(k1, l2).apply(psi) == k1.apply(l2.apply(psi)));
}

}
