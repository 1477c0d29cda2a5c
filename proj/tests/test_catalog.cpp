#include "doctest.h"

#include "pdm/catalog.hpp"
#include "pdm/errors.hpp"

#include <set>

using namespace pdm;

namespace {

SystemInstance first_instance(const std::string& id, std::uint64_t seed = 5) {
    const CatalogEntry& e = catalog_entry(id);
    std::mt19937_64 rng(seed);
    return instantiate(e, random_binding(e, binding_skeletons(e).front(), rng));
}

IntegralSpec flip_term(IntegralSpec q, std::size_t k) {
    q.terms[k].coeff = -q.terms[k].coeff;
    return q;
}

}  // namespace

TEST_CASE("catalog: all 21 entries load in natural order") {
    const auto& cat = builtin_catalog();
    REQUIRE(cat.size() == 21);
    std::set<std::string> ids;
    for (const auto& e : cat) ids.insert(e.id);
    CHECK(ids.size() == 21);
    CHECK(cat.front().id == "T1.1");
    CHECK(cat[1].id == "T1.2");
    CHECK(cat[11].id == "T1.12");
    CHECK(cat.back().id == "T2.9");
    CHECK(id_less("T1.2", "T1.10"));
    CHECK_FALSE(id_less("T2.1", "T1.12"));
}

TEST_CASE("catalog: text format round-trips") {
    for (const auto& e : builtin_catalog()) {
        const std::string text = serialize(e);
        const CatalogEntry back = parse_entry(text);
        CHECK(serialize(back) == text);
        CHECK(back.integrals.size() == e.integrals.size());
        CHECK(back.basis.has_value() == e.basis.has_value());
    }
}

TEST_CASE("catalog: syntax errors carry the line offset") {
    const std::string text = "[system]\nid = X\nf = 1\nV = 0\nbogus line\n";
    try {
        parse_entry(text);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == text.find("bogus"));
    }
    CHECK_THROWS_AS(parse_entry("[nonsense]\n"), SyntaxError);
    CHECK_THROWS_AS(parse_entry("[system]\nf = 1\nV = 0\n"), SyntaxError);
}

TEST_CASE("catalog: instantiation binds parameters and functions") {
    const CatalogEntry& e = catalog_entry("T1.6");
    const auto skeletons = binding_skeletons(e);
    CHECK(skeletons.size() == 3);
    std::mt19937_64 rng(1);
    const SystemInstance s = instantiate(e, random_binding(e, skeletons[0], rng));
    CHECK(s.f == parse_expr("rt^2*(1 + phi^2)"));
    CHECK(s.V == parse_expr("(1 + phi^2)*phi"));
    CHECK(binding_skeletons(catalog_entry("T1.4")).size() == 2);
    Binding missing;
    CHECK_THROWS_AS(instantiate(catalog_entry("T1.3"), missing), UnknownSymbol);
}

TEST_CASE("catalog: (1 . H) realizes the Hamiltonian and realize is linear") {
    const SystemInstance s = first_instance("T2.4");
    const DiffOp H = hamiltonian(s.f, s.V);
    CHECK(realize(IntegralTerm::fdoth(Expr(1)), s.f, s.V) == H);
    const IntegralSpec& q = s.integrals.front();
    DiffOp sum;
    for (const auto& t : q.terms) sum += realize(t, s.f, s.V);
    CHECK(realize(q, s.f, s.V) == sum);
    const auto form = second_order_form(sum);
    REQUIRE(form.has_value());
    CHECK(form->first[0][1] != Expr());
}

TEST_CASE("catalog: transcendental coefficients realize exactly") {
    const SystemInstance s = first_instance("T2.6");
    const DiffOp Q = realize(s.integrals.front(), s.f, s.V);
    CHECK(Q.order() == 2);
    CHECK(Q.coeff({0, 0, 0}).uses(var::phi));
    CHECK(commutator(hamiltonian(s.f, s.V), Q).is_zero());
}

TEST_CASE("catalog: arbitrary-function entry verifies exactly") {
    VerifyOptions opt;
    opt.trials = 1;
    const EntryReport rep = verify_entry(catalog_entry("T1.6"), opt);
    CHECK(rep.status == EntryStatus::Verified);
    CHECK(rep.trials.size() == 3);
    CHECK(rep.corrections.empty());
    for (const auto& l : rep.lie) CHECK(l.commutes);
}

TEST_CASE("catalog: nonzero commutators are reported with residuals") {
    // The second-order integral of this entry leaves a nonzero commutator
    // (confirmed by direct operator application in an independent script).
    const SystemInstance s = first_instance("T2.4");
    CheckOptions opt;
    const IntegralCheck c = check_integral(s, s.integrals.front(), opt);
    CHECK_FALSE(c.zero());
    CHECK_FALSE(c.exact_zero);
    CHECK_FALSE(c.oracle_zero);
    CHECK_FALSE(c.residual.empty());
    REQUIRE(c.diagnostics.has_value());
    CHECK(c.diagnostics->m1_zero);
    CHECK(c.diagnostics->m2_printed_zero);
    CHECK_FALSE(c.diagnostics->anomaly_zero);
}

TEST_CASE("catalog: a negated scalar term breaks a verified integral") {
    const SystemInstance s = first_instance("T1.6");
    const IntegralSpec& q = s.integrals.front();
    CheckOptions opt;
    CHECK(check_integral(s, q, opt).zero());
    const IntegralCheck bad = check_integral(s, flip_term(q, 2), opt);
    CHECK_FALSE(bad.exact_zero);
    CHECK(bad.commutator_order >= 0);
}

TEST_CASE("correction search: single flipped sign recovered at budget 1") {
    const SystemInstance s = first_instance("T1.6");
    const IntegralSpec bad = flip_term(s.integrals.front(), 1);
    const CorrectionSearch cs = correction_search(s, bad, 1);
    REQUIRE_FALSE(cs.variants.empty());
    bool restores = false;
    for (const auto& v : cs.variants) {
        IntegralSpec fixed = rescaled(bad, v.multipliers);
        CHECK(commutator(hamiltonian(s.f, s.V), realize(fixed, s.f, s.V)).is_zero());
        restores = restores || v.multipliers[1] == -1;
    }
    CHECK(restores);
}

TEST_CASE("correction search: verified integral needs nothing, double mutation exceeds budget 1") {
    const SystemInstance s = first_instance("T1.6");
    const IntegralSpec& q = s.integrals.front();
    const CorrectionSearch none = correction_search(s, q, 1);
    // No rescaling of a single term keeps a commuting integral commuting.
    CHECK(none.variants.empty());
    // Flipping two terms is undone by negating the third, so mutate the
    // scalar by a factor instead: no single rescaling repairs this.
    IntegralSpec twice = flip_term(q, 1);
    twice.terms[2].coeff = twice.terms[2].coeff * Expr(2);
    const CorrectionSearch cs = correction_search(s, twice, 1);
    CHECK(cs.variants.empty());
    CHECK(cs.candidates_tried > 0);
    const CorrectionSearch cs2 = correction_search(s, twice, 2);
    CHECK_FALSE(cs2.variants.empty());
}

TEST_CASE("catalog: exponential generator with a symbolic exponent") {
    const SystemInstance s = first_instance("T2.7");
    CHECK(s.float_values.count("nu") == 1);
    const VarId w = s.ctx.generators.at("w");
    const ExpGenerator* g = exp_generator(w);
    REQUIRE(g != nullptr);
    CHECK(g->exponent.size() == 2);
    // d w / d x_a = w * d(exponent)/d x_a
    const Expr W = Expr::var(w);
    Expr exponent;
    for (const auto& [c, base] : g->exponent) exponent += c * Expr::var(base);
    for (int a = 1; a <= 3; ++a) CHECK(differentiate(W, a) == W * differentiate(exponent, a));
    CheckOptions opt;
    const IntegralCheck c = check_integral(s, s.integrals.front(), opt);
    CHECK(c.float_checked);
}

TEST_CASE("catalog: random bindings are deterministic and avoid degeneracies") {
    const CatalogEntry& e = catalog_entry("T1.12");
    std::mt19937_64 a(9), b(9);
    const Binding x = random_binding(e, binding_skeletons(e).front(), a);
    const Binding y = random_binding(e, binding_skeletons(e).front(), b);
    CHECK(x.str() == y.str());
    CHECK_NOTHROW(instantiate(e, x));
}

TEST_CASE("catalog: verification reports are deterministic") {
    VerifyOptions opt;
    opt.trials = 1;
    const auto a = verify_entry(catalog_entry("T2.6"), opt).to_json().dump();
    const auto b = verify_entry(catalog_entry("T2.6"), opt).to_json().dump();
    CHECK(a == b);
}
