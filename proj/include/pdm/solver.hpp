#pragma once

// Reduction machinery for dilatation-invariant systems (the M matrix, its
// determinant and the recovery of the trace function g), the worked
// general-solution families, the shift-invariant reduction and a restricted
// exact linear ansatz search for second-order integrals.

#include "pdm/catalog.hpp"
#include "pdm/determining.hpp"
#include "pdm/killing.hpp"
#include "pdm/linalg.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

using Matrix3Expr = std::array<std::array<Expr, 3>, 3>;

/// Which Killing tensor class the matrix belongs to: constant (K0-form),
/// linear (K1-form) or quadratic (K2-form) tensors.
enum class MVariant { K0, K1, K2 };
std::string variant_name(MVariant v);

struct MMatrix {
    Matrix3Expr entries{};
    MVariant variant = MVariant::K0;
};

/// M^{ab} of the linear system M^{ab} f_b = 0:
///   K0-form: mu^{ab} (mu = lambda_1)
///   K1-form: mu^{ab} - lambda^a x^b - m^a x^b with lambda = lambda_2 and
///            m = the second vector slot of mu_2, kept independent
///   K2-form: mu^{ab} - lambda^{ac} x_c x_b with lambda = lambda_6
/// where mu^{ab} is the weighted sum of the families of that class.
/// Throws InvalidVariant if p has weight on families of another class.
MMatrix build_M(const KillingParams& p, MVariant v);

/// det(M).
Expr det_condition(const MMatrix& m);

/// M^{ab} f_b (the homogeneous linear system; zero when f solves it).
Vec3Expr m_system(const MMatrix& m, const Expr& f);

struct GRecovery {
    MVariant variant = MVariant::K0;
    int degree = 0;              // homogeneity degree n required of g
    Expr g;                      // K0/K1: the recovered g; K2: f * G is left open
    std::string reading;         // which printed reading was selected
    bool homogeneity_ok = false; // x_a g_a == n g
    /// K2 only: the right-hand side that G_phi must equal (components a=1, b=2).
    std::optional<Expr> g_phi_rhs;
    nlohmann::json to_json() const;
};

/// Checks x_a f_a == 2 f (throws NotDilatationInvariant otherwise) and then
///   K0: g = -x_a M^{ab} f_b / (2 f)
///   K1: both readings of the printed formula, -x_a M^{ab} f_b / f and
///       -x_a M^{ab} f_b, selecting the one homogeneous of degree 1
///   K2: g = f G(phi, theta) with G_phi = (x_1 M^{2c} f_c - x_2 M^{1c} f_c) / f^2.
GRecovery recover_g(const Expr& f, const MMatrix& m);

/// Residual G_phi - rhs of the K2-form constraint for a candidate G.
Expr g_phi_residual(const GRecovery& rec, const Expr& G);

/// Killing parameters (corrected variant) and trace function g with
/// build(p) == mu, or nullopt if mu is not a conformal Killing tensor plus a
/// trace term.
std::optional<KillingParams> decompose_killing(const KillingTensor& mu);

/// The reduction applied to one integral of a dilatation-invariant system:
/// the Killing part of its tensor is classified by degree, M is built for
/// that class, and the linear system, det(M) and the g recovery are checked.
struct MReduction {
    std::string label;
    std::string status;  // "ok", "mixed degrees", "no second-order form", ...
    std::optional<MVariant> variant;
    bool system_holds = false;  // M^{ab} f_b == 0
    bool det_zero = false;      // det(M) == 0 identically
    bool g_matches = false;     // recovered g equals the integral's trace part
    std::string det;
    nlohmann::json to_json() const;
};
std::vector<MReduction> m_reduction(const SystemInstance& s);

/// A generated system with its integral in table notation.
struct GeneratedPair {
    std::string name;
    Expr f, V;
    IntegralSpec q;
};

/// f = rt^2 / (rt^2 F - G), V = (N + M) / (G - rt^2 F), Q1 = L3^2 + (G . H) + N + M.
/// F = F(x3, rt), G = G(phi), N = N(phi), M = M(rt, x3).
/// Throws DegenerateFamily if a denominator vanishes identically.
GeneratedPair family_L3sq(const Expr& F, const Expr& G, const Expr& N, const Expr& M);

/// Dilatation-only variant: f = rt^2 / (F(phi) + G(theta)),
/// V = (R(theta) + N(phi)) / (F + G), Q = L3^2 - (F . H) + N, i.e. mu = L3^2 tensor
/// - F f delta and eta = -F V + N.
GeneratedPair family_L3sq_dilatation(const Expr& F, const Expr& G, const Expr& R, const Expr& N);

/// f = 1 / (F(x1,x2) + G(x3)), V = (M(x1,x2) + N(x3)) / (F + G),
/// Q2 = P3^2 - (G . H) + N.
GeneratedPair family_P3sq(const Expr& F, const Expr& G, const Expr& M, const Expr& N);

struct PairCheck {
    std::string name;
    std::string instance;
    bool commutes = false;
    bool m1_zero = false;
    bool m2_printed_zero = false;
    bool anomaly_zero = false;
    std::string residual;  // leading commutator coefficient when nonzero
    nlohmann::json to_json() const;
};
/// check_all on the realized pair (second-order form of Q).
PairCheck check_pair(const GeneratedPair& p, const std::string& instance = "");

/// Random function instances for the three families (deterministic in seed).
std::vector<GeneratedPair> sample_L3sq(int n, std::uint64_t seed);
std::vector<GeneratedPair> sample_L3sq_dilatation(int n, std::uint64_t seed);
std::vector<GeneratedPair> sample_P3sq(int n, std::uint64_t seed);

// ---------------------------------------------------------------- ansatz search

/// One unknown tensor of the ansatz with its label.
struct AnsatzTensor {
    std::string label;
    KillingTensor mu;
};

struct AnsatzProblem {
    Expr f, V;
    std::vector<AnsatzTensor> tensors;   // Killing part (each coefficient unknown)
    /// F_j of (F_j . H) terms: mu gains delta^{ab} F_j f and eta gains F_j V.
    std::vector<Expr> fh_dictionary;
    std::vector<Expr> eta_dictionary;    // scalar terms
    /// Optional fixed tensor with coefficient 1 (inhomogeneous search).
    std::optional<AnsatzTensor> fixed;
    int points = 0;                      // 0: twice the number of unknowns
    std::uint64_t salt = 0;
    /// Use the potential condition as printed (without the ordering term):
    /// solutions then satisfy the classical conditions only and are verified
    /// against those instead of the commutator.
    bool classical = false;
};

/// Unit-slot tensors of the given Killing families (0 is ignored: the
/// (F . H) dictionary plays its role).
std::vector<AnsatzTensor> killing_slot_tensors(const std::vector<int>& families);

struct AnsatzSolution {
    KillingTensor mu;
    Expr eta;
    DiffOp op;
    std::vector<Gauss> coefficients;  // tensors, then (F . H), then eta dictionary
    std::string text;                 // table notation when expressible
    nlohmann::json to_json() const;
};

struct AnsatzResult {
    std::vector<AnsatzSolution> solutions;  // each verified by check_all
    bool classical = false;
    int unknowns = 0;
    int rows = 0;
    int nullspace_dimension = 0;
    int rejected = 0;  // nullspace vectors that failed symbolic verification
    nlohmann::json to_json() const;
};

/// Exact collocation of the first-order and (complete) potential conditions
/// over Q(i). Throws NeedMorePoints when there are fewer rows than unknowns.
AnsatzResult ansatz_solve(const AnsatzProblem& problem);

/// Builds the problem declared by a catalog entry's [basis] section.
AnsatzProblem ansatz_problem(const CatalogEntry& e, const SystemInstance& s, std::uint64_t salt = 0);

/// Expresses p mu p + eta in table notation: a combination of generator
/// bilinears, an (F . H) term and a scalar. Nullopt if the Killing part of mu
/// is not spanned by the bilinears.
std::optional<IntegralSpec> to_integral_spec(const KillingTensor& mu, const Expr& eta, const Expr& f,
                                             const Expr& V);

struct RecoveryResult {
    std::string label;
    bool recovered = false;  // in span(solutions, H, 1, Lie bilinears)
    bool commutes = false;   // the printed integral commutes with H
    nlohmann::json to_json() const;
};
/// Printed integrals of s checked against the span of the ansatz solutions,
/// H, 1 and the anticommutators of the Lie symmetries.
std::vector<RecoveryResult> recover_printed(const SystemInstance& s, const AnsatzResult& r);

// ---------------------------------------------------------------- shift invariance

struct ShiftCandidate {
    std::string name;  // e.g. "P3 P1", "{P1, D}"
    bool closes = false;
    std::optional<AnsatzSolution> solution;
    nlohmann::json to_json() const;
};

/// For systems with the translations P1, P2: each candidate bilinear
/// {P3 P1, P3 P2, {P_a, D}, {P3, L_a}} is completed with (g . H)-type and scalar
/// terms solved from the linear conditions over dictionaries derived from f and V.
std::vector<ShiftCandidate> shift_reduction(const Expr& f, const Expr& V);

}  // namespace pdm
