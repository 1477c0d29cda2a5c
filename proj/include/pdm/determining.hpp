#pragma once

// Determining equations for [H, Q] = 0 with H = p f p + V and Q = p mu p + eta:
// the conformal Killing condition on mu, the first-order condition linking f and mu,
// the potential condition, its f-dependent anomaly, and the trilinear tensors.

#include "pdm/killing.hpp"

#include <string>
#include <vector>

namespace pdm {

using Vec3Expr = std::array<Expr, 3>;

/// Symmetric third-order coefficient of [H, Q] equals this factor times the
/// cyclic sum of the corrected trilinear tensor (pinned by a seed computation).
inline const mpq_class kThirdOrderFactor{2, 3};

/// (mu^{nn}_a + 2 mu^{na}_n) f - 5 mu^{an} f_n
Vec3Expr residual_m1(const Expr& f, const KillingTensor& mu);

/// mu^{ab} V_b - f eta_a, as printed
Vec3Expr residual_m2(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta);

/// R_a = f Lap(div mu)_a + f_b d_b (div mu)_a - f_ab (div mu)_b - mu^{bc} f_abc,
/// where (div mu)_a = mu^{ab}_b. The complete potential condition is m2 + R/2 = 0.
Vec3Expr anomaly(const Expr& f, const KillingTensor& mu);

/// mu^{ab} V_b - f eta_a + R_a / 2
Vec3Expr residual_m2_completed(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta);

struct TrilinearTensors {
    Rank3 q;       // tensor as given by the literal formula
    Rank3 cyclic;  // Q^{abc} + Q^{bca} + Q^{cab}
};

/// Printed trilinear tensor (mu^{ac} f_b - mu^{ab}_c) f + delta^{ab}(mu^{an} f_n - mu^{an}_n f).
TrilinearTensors qabc(const Expr& f, const KillingTensor& mu);

/// Corrected trilinear tensor f mu^{ab}_c - delta^{ab} mu^{cn} f_n.
TrilinearTensors qabc_corrected(const Expr& f, const KillingTensor& mu);

/// Commutator of the Hamiltonian with the second-order integral candidate.
DiffOp integral_commutator(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta);

struct DeterminingResidual {
    Rank3 m0{};
    Vec3Expr m1{};
    Vec3Expr m2{};           // printed potential condition
    Vec3Expr anomaly{};      // R_a
    Vec3Expr m2_completed{}; // m2 + R/2
    bool m0_waived = false;
    bool m0_zero = true;
    bool m1_zero = false;
    bool m2_printed_zero = false;
    bool m2_zero = false;
    bool commutator_zero = false;
    bool all_zero = false;           // m0 && m1 && completed m2 (== commutator_zero)
    bool printed_all_zero = false;   // m0 && m1 && printed m2
    std::vector<std::string> warnings;
};

/// Evaluates all conditions and cross-checks them against the direct commutator.
/// With waive_m0 the conformal Killing residual is not required; if the
/// commutator then disagrees, a warning is recorded instead of an error.
/// Throws InternalError if the equations and the commutator disagree otherwise.
DeterminingResidual check_all(const Expr& f, const Expr& V, const KillingTensor& mu, const Expr& eta,
                              bool waive_m0 = false);

bool is_zero(const Vec3Expr& v);

}  // namespace pdm
