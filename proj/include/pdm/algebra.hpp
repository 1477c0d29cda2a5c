#pragma once

// Algebraic facts about the conformal generators: the bilinear identities of
// the extended enveloping algebra, commutator closure and so(1,4) structure
// constants, the inversion x -> x/r^2, the Lie symmetries of the six
// two-parameter families, and the L3 decoupling of catalog integrals.

#include "pdm/catalog.hpp"
#include "pdm/diffop.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pdm {

struct IdentityResult {
    std::string name;      // e.g. "{P_a,K_a} = -4D^2 + 2P_a r^2 P_a"
    std::string instance;  // index values, e.g. "a=1"
    bool holds = false;
    bool constant_offset = false;  // lhs - rhs is a nonzero constant
    std::string residual;          // normal form of lhs - rhs when nonzero
};

/// P_c g P_c = -d_c g d_c (the p g p notation of the identities).
DiffOp pgp(const Expr& g);

/// Every instance of the nine identity lines (index values enumerated).
std::vector<IdentityResult> verify_identities();
/// Repaired forms of the identity lines that fail as printed (coefficients
/// fitted by exact span membership); each is checked like a printed line.
std::vector<IdentityResult> verify_identity_repairs();
/// Same check for an arbitrary fixture (lhs, rhs), used by self-tests.
IdentityResult check_identity(const std::string& name, const DiffOp& lhs, const DiffOp& rhs);

struct ClosureResult {
    bool closed = true;  // every commutator is a combination of the generators
    /// table[i][j][k]: coefficient of generator k in [G_i, G_j]
    std::vector<std::vector<std::vector<Gauss>>> table;
    std::vector<std::string> names;
    std::vector<std::string> failures;
};

/// Closure of the ten generators P, L, D, K under commutation.
ClosureResult closure_c3();
/// Structure constants in the basis S_ab = eps_abc L_c, S_4a = (K_a - P_a)/2,
/// S_0a = (K_a + P_a)/2, S_04 = D.
ClosureResult closure_so14();
std::vector<DiffOp> so14_basis(std::vector<std::string>* names = nullptr);

/// Conjugation by the inversion (T psi)(x) = r^w psi(x / r^2) (an involution
/// for every weight w). Throws UnsupportedExpression for coefficients that
/// use ln(rt) or exponential generators.
DiffOp inversion_transform(const DiffOp& op, int weight = -3);

struct InversionResult {
    std::string generator;
    std::string image;  // "K_1", "-D", ... or "not a generator multiple"
    bool matches_printed = false;  // P->K, K->P, L->L, D->D
    bool involution = false;
};
std::vector<InversionResult> verify_inversion(int weight = -3);

struct FamilyLieResult {
    std::string family;
    std::string instance;
    std::string generator;
    bool commutes = false;
    std::string residual;
};
/// Listed Lie symmetries checked on each family fV1..fV6 for sample functions.
std::vector<FamilyLieResult> family_lie_checks(int instances = 3);
/// f, V of a family for the k-th sample function pair.
std::pair<Expr, Expr> family_sample(const std::string& family, int k);
/// The printed Lie generators of a family (IM list).
std::vector<std::string> family_generators(const std::string& family);

struct DecouplingResult {
    std::string label;
    bool l3_commutes_with_h = false;
    bool in_span = false;  // [L3, Q] in span(integrals, H, 1, Lie bilinears)
};
/// For a system with L3 among its Lie symmetries.
std::vector<DecouplingResult> l3_decoupling(const SystemInstance& s);

nlohmann::json to_json(const std::vector<IdentityResult>& r);
nlohmann::json to_json(const ClosureResult& r);
nlohmann::json to_json(const std::vector<InversionResult>& r);
nlohmann::json to_json(const std::vector<FamilyLieResult>& r);

}  // namespace pdm
