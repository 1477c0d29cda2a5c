#pragma once

// The conformal Killing tensor families mu_0..mu_9 with their 35 constant
// parameters, the conformal Killing equation residual and homogeneity grading.

#include "pdm/diffop.hpp"

#include <gmpxx.h>

#include <array>
#include <optional>
#include <random>

namespace pdm {

using Vec3 = std::array<mpq_class, 3>;
using Mat3 = std::array<std::array<mpq_class, 3>, 3>;
using KillingTensor = SymMatrix;
using Rank3 = std::array<std::array<std::array<Expr, 3>, 3>, 3>;

/// Printed: every symbol of the printed formulas has its own slot
/// (the trace vector in mu_2, lambda_5 in mu_6). Corrected: those slots are
/// tied to lambda_2 and lambda_6 respectively.
enum class KillingVariant { Printed, Corrected };

struct KillingParams {
    Mat3 lambda1{}, lambda3{}, lambda6{}, lambda8{}, lambda9{};
    Vec3 lambda2{}, lambda4{}, lambda7{};
    mpq_class k = 0;
    Vec3 mu2_trace_vector{};  // printed second vector inside mu_2
    Mat3 lambda5{};           // printed second matrix inside mu_6
    std::array<mpq_class, 10> weights{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    Expr g;
    KillingVariant variant = KillingVariant::Printed;

    /// Parameters with every weight zero except family m.
    static KillingParams only(int family, KillingVariant v = KillingVariant::Printed);
};

/// Number of independent constants (5+3+5+3+1+5+3+5+5 = 35).
inline constexpr int kKillingParameterCount = 35;

/// Sum of c_m mu_m plus the delta g term. Throws InvalidParams for
/// non-symmetric or non-traceless matrix slots.
KillingTensor build(const KillingParams& p);

/// The single printed family tensor mu_m (unweighted) for m = 0..9.
KillingTensor family_tensor(int m, const KillingParams& p);

/// Homogeneity degree of family m (mu_0 depends on g; returns nullopt there).
std::optional<int> family_degree(int m);

/// LHS - RHS of the conformal Killing equation for every (a,b,c).
Rank3 conformal_killing_residual(const KillingTensor& mu);
bool is_zero(const Rank3& t);
bool is_zero(const KillingTensor& t);

/// Degree n with x.grad(mu^{ab}) = n mu^{ab} for every nonzero entry;
/// nullopt if mixed (or the tensor is zero).
std::optional<int> homogeneity_degree(const KillingTensor& mu);

/// Random traceless symmetric matrix / vector with small rational entries.
Mat3 random_traceless(std::mt19937_64& rng);
Vec3 random_vector(std::mt19937_64& rng);
/// Fills the constant slots of family m with random values.
void randomize_family(KillingParams& p, int m, std::mt19937_64& rng);

/// Unit basis of the traceless symmetric 3x3 matrices (5 elements).
const std::array<Mat3, 5>& traceless_basis();

KillingTensor operator+(const KillingTensor& a, const KillingTensor& b);
KillingTensor scale(const KillingTensor& a, const Expr& c);

}  // namespace pdm
