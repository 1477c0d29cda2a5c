// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. A criterion that fails is reported with the computation that
// shows why; nothing is relaxed to make a line pass.
//
// Exit status: 0 when every criterion was evaluated (whatever its outcome),
// 1 on an internal error. With --strict, also 2 when any criterion fails.

#include "pdm/algebra.hpp"
#include "pdm/catalog.hpp"
#include "pdm/determining.hpp"
#include "pdm/errors.hpp"
#include "pdm/oracle.hpp"
#include "pdm/solver.hpp"

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pdm;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
    std::vector<std::string> details;
};

std::string one_line(std::string s) {
    for (std::size_t k = 0; (k = s.find('\n', k)) != std::string::npos;) s.replace(k, 1, "; ");
    return s;
}

KillingTensor delta_times(const Expr& g) {
    KillingTensor mu{};
    for (int a = 0; a < 3; ++a) mu[a][a] = g;
    return mu;
}

Expr small_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    if (depth == 0 || pick(rng) < 3) {
        switch (std::uniform_int_distribution<int>(0, 7)(rng)) {
            case 0: return Expr::x(1);
            case 1: return Expr::x(2);
            case 2: return Expr::x(3);
            case 3: return Expr(std::uniform_int_distribution<long>(1, 4)(rng));
            case 4: return Expr::r();
            case 5: return Expr::rt();
            case 6: return Expr::phi();
            default: return Expr::theta();
        }
    }
    const Expr a = small_expr(rng, depth - 1), b = small_expr(rng, depth - 1);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return a + b;
        case 1: return a - b;
        case 2: return a * b;
        default: return b.is_zero() ? a : a / b;
    }
}

Expr nonzero_expr(std::mt19937_64& rng, int depth) {
    for (;;)
        if (Expr e = small_expr(rng, depth); !e.is_zero()) return e;
}

KillingTensor random_killing(std::mt19937_64& rng) {
    KillingParams p;
    p.variant = KillingVariant::Corrected;
    for (auto& w : p.weights) w = 0;
    std::uniform_int_distribution<int> fam(1, 9);
    for (int k = 0; k < 2; ++k) {
        const int m = fam(rng);
        p.weights[static_cast<std::size_t>(m)] = 1;
        randomize_family(p, m, rng);
    }
    return build(p);
}

SystemInstance instance_of(const std::string& id, std::uint64_t seed) {
    const CatalogEntry& e = catalog_entry(id);
    std::mt19937_64 rng(seed);
    return instantiate(e, random_binding(e, binding_skeletons(e).front(), rng));
}

// ---------------------------------------------------------------- 1

Outcome identities() {
    Outcome o;
    const auto rs = verify_identities();
    std::map<std::string, bool> lines;
    for (const auto& r : rs) {
        auto [it, fresh] = lines.emplace(r.name, true);
        it->second = it->second && r.holds;
    }
    int held = 0;
    for (const auto& [name, ok] : lines) {
        held += ok;
        if (!ok) {
            for (const auto& r : rs)
                if (r.name == name && !r.holds) {
                    o.details.push_back("fails: " + name + " [" + r.instance + "] residual " + one_line(r.residual));
                    break;
                }
        }
    }
    const auto repairs = verify_identity_repairs();
    int repaired = 0;
    for (const auto& r : repairs) repaired += r.holds;
    o.pass = held == static_cast<int>(lines.size());
    o.summary = std::to_string(held) + "/" + std::to_string(lines.size()) + " printed lines hold exactly; " +
                std::to_string(repaired) + "/" + std::to_string(repairs.size()) + " repaired instances hold";
    if (!o.pass)
        o.details.push_back("analysis: the failing lines differ already in their principal symbols or by "
                            "coefficients; the fitted repairs hold exactly (see identities report)");
    return o;
}

// ---------------------------------------------------------------- 2

Outcome killing_suite() {
    Outcome o;
    std::mt19937_64 rng(2);
    int tensors = 0, failures = 0, draws = 0;
    // delta g family: five distinct g, each on its own.
    for (int k = 0; k < 5; ++k) {
        auto p = KillingParams::only(0);
        p.g = nonzero_expr(rng, 3);
        ++tensors;
        for (int d = 0; d < 10; ++d) {
            ++draws;
            auto q = p;
            q.g = p.g * Expr(std::uniform_int_distribution<long>(1, 9)(rng));
            if (!is_zero(conformal_killing_residual(build(q)))) ++failures;
        }
    }
    // the nine parameter families.
    int printed_failures = 0;
    for (int m = 1; m <= 9; ++m) {
        ++tensors;
        for (int d = 0; d < 10; ++d) {
            ++draws;
            auto p = KillingParams::only(m, KillingVariant::Corrected);
            randomize_family(p, m, rng);
            if (!is_zero(conformal_killing_residual(build(p)))) {
                ++failures;
                o.details.push_back("family " + std::to_string(m) + " draw " + std::to_string(d) + " nonzero");
            }
            auto pr = p;
            pr.variant = KillingVariant::Printed;
            randomize_family(pr, m, rng);
            if (!is_zero(conformal_killing_residual(build(pr)))) ++printed_failures;
        }
    }
    o.pass = failures == 0 && tensors == 14;
    o.summary = std::to_string(tensors) + " tensors (5 g for K0 + 9 families), " + std::to_string(draws) +
                " draws, " + std::to_string(failures) + " nonzero residuals";
    o.details.push_back("with the printed independent lambda_5 slot in mu_6: " + std::to_string(printed_failures) +
                        "/90 draws nonzero (the equation forces lambda_5 = lambda_6)");
    return o;
}

// ---------------------------------------------------------------- 3

Outcome closure() {
    Outcome o;
    const auto c3 = closure_c3();
    const auto so = closure_so14();
    const auto inv = verify_inversion();
    int matches = 0, involutions = 0;
    for (const auto& r : inv) {
        matches += r.matches_printed;
        involutions += r.involution;
        if (!r.matches_printed) o.details.push_back("inversion " + r.generator + " -> " + r.image);
    }
    o.pass = c3.closed && so.closed && matches == 10 && involutions == 10;
    o.summary = std::string("c(3) ") + (c3.closed ? "closed" : "not closed") + ", so(1,4) " +
                (so.closed ? "closed" : "not closed") + "; inversion matches " + std::to_string(matches) +
                "/10, involution " + std::to_string(involutions) + "/10";
    if (matches != 10)
        o.details.push_back("analysis: [D,P] = iP and [D,K] = -iK force D -> -D under any automorphism that "
                            "swaps P and K, so the printed D -> D cannot hold");
    return o;
}

// ---------------------------------------------------------------- 4

Outcome derivation() {
    Outcome o;
    std::mt19937_64 rng(4);
    const Expr kappa{Gauss(kThirdOrderFactor)};
    int match = 0, printed_match = 0;
    for (int i = 0; i < 50; ++i) {
        const Expr f = nonzero_expr(rng, 2);
        KillingTensor mu = random_killing(rng);
        if (i % 3 == 0) mu = mu + delta_times(small_expr(rng, 2));
        const auto t = third_order_tensor(commutator(hamiltonian(f, Expr()), from_second_order(mu, Expr())));
        const auto cyc = qabc_corrected(f, mu).cyclic;
        const auto printed = qabc(f, mu).cyclic;
        bool ok = true, pok = true;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    ok = ok && t[a][b][c] == kappa * cyc[a][b][c];
                    pok = pok && t[a][b][c] == kappa * printed[a][b][c];
                }
        match += ok;
        printed_match += pok;
    }
    int agree = 0, positives = 0;
    for (int i = 0; i < 50; ++i) {
        Expr f = nonzero_expr(rng, 2);
        Expr V = small_expr(rng, 2);
        KillingTensor mu;
        Expr eta;
        switch (i % 3) {
            case 0: {  // c H + d
                const Expr c(std::uniform_int_distribution<long>(1, 4)(rng));
                mu = delta_times(c * f);
                eta = c * V + Expr(3);
                break;
            }
            case 1: {  // x3-independent data with P3^2
                f = f.uses(var::x3) || f.uses(var::r) || f.uses(var::theta) ? Expr::rt() + Expr(2) : f;
                V = V.uses(var::x3) || V.uses(var::r) || V.uses(var::theta) ? Expr::phi() : V;
                mu = KillingTensor{};
                mu[2][2] = Expr(1);
                break;
            }
            default:
                mu = random_killing(rng);
                eta = small_expr(rng, 2);
        }
        const auto r = check_all(f, V, mu, eta);
        agree += r.all_zero == r.commutator_zero;
        positives += r.all_zero;
    }
    o.pass = match == 50 && agree == 50;
    o.summary = "third-order coefficient = (2/3) x cyclic(Q') on " + std::to_string(match) +
                "/50; check_all <=> [H,Q] = 0 on " + std::to_string(agree) + "/50 (" + std::to_string(positives) +
                " commuting)";
    o.details.push_back("pinned global constant 2/3 with the corrected tensor Q'^{abc} = f mu^{ab}_c - "
                        "delta^{ab} mu^{cn} f_n; the literal Q^{abc} matches on " +
                        std::to_string(printed_match) + "/50");
    o.details.push_back("check_all uses the completed potential condition m2 + R/2 = 0 (R = ordering anomaly)");
    return o;
}

// ---------------------------------------------------------------- 5

Outcome catalog_suite() {
    Outcome o;
    VerifyOptions opt;
    opt.trials = 3;
    opt.budget = 2;
    int verified = 0, corrected = 0, discrepant = 0, silent = 0, bindings_short = 0;
    for (const auto& e : builtin_catalog()) {
        const EntryReport rep = verify_entry(e, opt);
        if (rep.bindings.size() < 3) ++bindings_short;
        switch (rep.status) {
            case EntryStatus::Verified: ++verified; break;
            case EntryStatus::Corrected: ++corrected; break;
            case EntryStatus::Discrepant: {
                ++discrepant;
                bool has_residual = false;
                std::string first;
                for (const auto& trial : rep.trials)
                    for (const auto& c : trial)
                        if (!c.zero() && !c.residual.empty()) {
                            has_residual = true;
                            if (first.empty()) first = c.label + ": " + c.residual.front();
                        }
                if (!has_residual) ++silent;
                o.details.push_back(e.id + " DISCREPANT (" + first + ")");
                break;
            }
        }
    }
    o.pass = discrepant == 0 && silent == 0 && bindings_short == 0;
    o.summary = std::to_string(verified) + " verified, " + std::to_string(corrected) + " corrected, " +
                std::to_string(discrepant) + " discrepant of 21; silent failures: " + std::to_string(silent);
    if (!o.pass)
        o.details.push_back("analysis: the discrepant integrals violate m1, the printed m2, or only the "
                            "f-dependent ordering anomaly; no rescaling of <= 2 terms gives a commuting operator");
    return o;
}

// ---------------------------------------------------------------- 6

Outcome lie_suite() {
    Outcome o;
    const auto rs = family_lie_checks(3);
    int ok = 0;
    for (const auto& r : rs) {
        ok += r.commutes;
        if (!r.commutes)
            o.details.push_back(r.family + " " + r.generator + " [" + r.instance + "] residual " + one_line(r.residual));
    }
    o.pass = ok == static_cast<int>(rs.size());
    o.summary = std::to_string(ok) + "/" + std::to_string(rs.size()) + " (family, instance, generator) checks commute";
    return o;
}

// ---------------------------------------------------------------- 7

Outcome families_suite() {
    Outcome o;
    struct Group {
        const char* name;
        std::vector<GeneratedPair> pairs;
    };
    std::vector<Group> groups = {{"family_L3sq", sample_L3sq(5, 7)},
                                 {"dilatation variant", sample_L3sq_dilatation(5, 7)},
                                 {"family_P3sq", sample_P3sq(5, 7)}};
    o.pass = true;
    std::ostringstream sum;
    for (const auto& g : groups) {
        int commuting = 0, m1 = 0, m2 = 0;
        for (const auto& p : g.pairs) {
            const PairCheck c = check_pair(p);
            commuting += c.commutes;
            m1 += c.m1_zero;
            m2 += c.m2_printed_zero;
        }
        o.pass = o.pass && commuting == static_cast<int>(g.pairs.size());
        if (sum.tellp() > 0) sum << "; ";
        sum << g.name << " " << commuting << "/" << g.pairs.size() << " commute";
        o.details.push_back(std::string(g.name) + ": m1 holds " + std::to_string(m1) + "/5, printed m2 holds " +
                            std::to_string(m2) + "/5");
    }
    o.summary = sum.str();
    if (!o.pass)
        o.details.push_back("analysis: the families solve the classical (Poisson) conditions; with H = p f p + V "
                            "the ordering anomaly R is not a gradient multiple that eta could absorb");
    return o;
}

// ---------------------------------------------------------------- 8

Outcome recovery_suite() {
    Outcome o;
    int total = 0, recovered = 0;
    o.pass = true;
    for (const char* id : {"T1.3", "T1.7", "T2.8"}) {
        const CatalogEntry& e = catalog_entry(id);
        const SystemInstance s = instance_of(id, 8);
        const AnsatzResult r = ansatz_solve(ansatz_problem(e, s, 8));
        for (const auto& x : recover_printed(s, r)) {
            ++total;
            recovered += x.recovered;
            o.pass = o.pass && x.recovered;
            o.details.push_back(std::string(id) + " " + x.label + ": " + (x.recovered ? "recovered" : "not recovered") +
                                (x.commutes ? "" : " (printed integral does not commute with H)"));
        }
        o.details.push_back(std::string(id) + ": " + std::to_string(r.unknowns) + " unknowns, nullspace " +
                            std::to_string(r.nullspace_dimension) + ", " + std::to_string(r.solutions.size()) +
                            " verified solutions");
    }
    o.summary = std::to_string(recovered) + "/" + std::to_string(total) + " printed integrals recovered";
    return o;
}

// ---------------------------------------------------------------- 9

double rel_diff(const Complex& a, const Gauss& b) {
    const Complex bb(b.real_double(), b.imag_double());
    const double scale = std::max({1.0, std::abs(a), std::abs(bb)});
    return std::abs(a - bb) / scale;
}

Outcome oracle_suite() {
    Outcome o;
    // Every symbolically verified (system, integral) pair of the catalog.
    std::vector<std::pair<SystemInstance, IntegralSpec>> pairs;
    for (const auto& e : builtin_catalog()) {
        for (const auto& skel : binding_skeletons(e)) {
            std::mt19937_64 rng(9);
            SystemInstance s;
            try {
                s = instantiate(e, random_binding(e, skel, rng));
            } catch (const Error&) {
                continue;
            }
            if (!s.float_values.empty()) continue;  // symbolic exponent: float path only
            for (const auto& q : s.integrals)
                if (commutator(hamiltonian(s.f, s.V), realize(q, s.f, s.V)).is_zero()) pairs.emplace_back(s, q);
        }
    }
    int exact_zero = 0, evaluations = 0;
    double worst = 0.0;
    std::uint64_t salt = 1;
    for (const auto& [s, q] : pairs) {
        const DiffOp H = hamiltonian(s.f, s.V);
        const DiffOp Q = realize(q, s.f, s.V);
        const OracleResult r = residual_suite(H, Q, 8, OraclePath::Exact);
        exact_zero += r.exact_max == 0 && r.points_used == 8;
        o.details.push_back(s.id + " " + q.label + " [" + s.binding.str() + "]: exact oracle max " +
                            r.exact_max.get_str() + " at " + std::to_string(r.points_used) + " points");
    }
    // Float vs exact on the coefficients of the verified pairs.
    for (std::size_t k = 0; evaluations < 100 && !pairs.empty(); ++k) {
        const auto& [s, q] = pairs[k % pairs.size()];
        const DiffOp op = k % 2 ? realize(q, s.f, s.V) : hamiltonian(s.f, s.V);
        for (PointSample p : sample_points(4, salt++)) {
            p.float_uses_surrogates = true;
            for (int slot = 0; slot < DiffOp::kSlots && evaluations < 100; ++slot) {
                const Expr& c = op.coeff_at(slot);
                if (c.is_zero()) continue;
                try {
                    const auto je = jet_of(c, p);
                    const auto jf = jet_of_float(c, p);
                    for (int i = 0; i < jet::kSize; ++i) worst = std::max(worst, rel_diff(jf[i], je[i]));
                    ++evaluations;
                } catch (const PoleAtPoint&) {
                }
            }
        }
        if (k > 10000) break;
    }
    o.pass = !pairs.empty() && exact_zero == static_cast<int>(pairs.size()) && evaluations == 100 && worst <= 1e-12;
    std::ostringstream sum;
    sum << pairs.size() << " verified pairs, exact oracle 0 at 8 points on " << exact_zero << "; float vs exact on "
        << evaluations << " coefficient jets, max relative difference " << worst;
    o.summary = sum.str();
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"identity suite", identities},
        {"Killing suite", killing_suite},
        {"algebra closure and inversion", closure},
        {"derivation replication", derivation},
        {"catalog verification", catalog_suite},
        {"Lie-symmetry preconditions", lie_suite},
        {"general-solution families", families_suite},
        {"recovery test", recovery_suite},
        {"oracle consistency", oracle_suite},
    };
    int failed = 0, n = 0;
    try {
        for (const auto& [name, run] : criteria) {
            ++n;
            const auto t0 = std::chrono::steady_clock::now();
            const Outcome o = run();
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            failed += !o.pass;
            std::printf("criterion %d: %s - %s: %s (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", name, o.summary.c_str(),
                        secs);
            for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
            std::fflush(stdout);
        }
    } catch (const std::exception& ex) {
        std::printf("internal error in criterion %d: %s\n", n, ex.what());
        return 1;
    }
    std::printf("criteria evaluated: %d, passed: %d, failed: %d\n", n, n - failed, failed);
    return strict && failed > 0 ? 2 : 0;
}
