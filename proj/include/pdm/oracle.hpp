#pragma once

// Truncated Taylor jets (total degree <= 4 in three variables) at sample
// points, over exact Gaussian rationals or complex doubles, and pointwise
// evaluation of commutator normal-form coefficients from those jets.

#include "pdm/diffop.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace pdm {

enum class OraclePath { Exact, Float };

using Complex = std::complex<double>;

/// A sample point with rational r and rt. Relation-free indeterminates
/// (angles, logarithms, exponential generators, parameters) get rational
/// surrogate values on the exact path, derived deterministically from `salt`
/// and the indeterminate's name. The float path uses true values for angles,
/// logarithms and exponentials, and `float_values` (if present) for parameters.
struct PointSample {
    std::array<mpq_class, 3> x;
    std::uint64_t salt = 0;
    std::map<std::string, double> float_values;
    /// Float path with the exact path's surrogate values (for path comparison).
    bool float_uses_surrogates = false;

    mpq_class surrogate(VarId v) const;
    mpq_class r() const;   // throws InconsistentPoint if irrational
    mpq_class rt() const;  // throws InconsistentPoint if irrational
    std::string str() const;
};

/// The eight default sample points (all with rational r and rt).
const std::vector<PointSample>& default_points();
/// n points: the defaults first, then scaled copies (scaling keeps r, rt rational).
std::vector<PointSample> sample_points(int n, std::uint64_t salt = 0);

namespace jet {
inline constexpr int kDegree = 4;
inline constexpr int kSize = 35;
/// Position of the monomial y1^a y2^b y3^c.
int index(int a, int b, int c);
const MultiIndex& exponent(int i);
}  // namespace jet

/// Truncated Taylor expansion; `order` (0..4) is the truncation degree, and
/// binary operations truncate at the smaller of the two orders.
template <class S>
class Jet {
public:
    Jet() { c_.fill(S(0)); }
    static Jet constant(const S& v, int order = jet::kDegree) {
        Jet j;
        j.c_[0] = v;
        j.order_ = order;
        return j;
    }
    /// p + y_a (a = 0..2)
    static Jet coordinate(const S& p, int a, int order = jet::kDegree);
    int order() const { return order_; }

    const S& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    S& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const S& value() const { return c_[0]; }
    /// Derivative d^alpha at the point (Taylor coefficient times alpha!).
    S derivative(const MultiIndex& alpha) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    Jet operator*(const Jet& b) const;
    friend Jet operator*(const S& s, Jet a) {
        for (auto& v : a.c_) v = s * v;
        return a;
    }
    Jet operator-() const { return S(-1) * *this; }

    /// 1/J; throws PoleAtPoint if the value vanishes.
    Jet reciprocal() const;
    /// sqrt(J) given the square root `root` of the value.
    Jet sqrt_with(const S& root) const;
    /// exp(J - J(0)) scaled by `value`.
    Jet exp_with(const S& value) const;
    Jet pow(int n) const;
    /// Degree-k homogeneous part integrated from gradient jets (exact forms).
    static Jet integrate(const S& value, const std::array<Jet, 3>& gradient);

    friend bool operator==(const Jet& a, const Jet& b) { return a.c_ == b.c_; }

private:
    std::array<S, jet::kSize> c_;
    int order_ = jet::kDegree;
};

extern template class Jet<Gauss>;
extern template class Jet<Complex>;

/// Evaluates expressions as jets at one point; caches indeterminate jets.
template <class S>
class JetEvaluator {
public:
    /// `order` is the truncation degree of every jet produced (0 = values only).
    explicit JetEvaluator(PointSample p, int order = jet::kDegree);
    Jet<S> jet_of(const Expr& e);
    const PointSample& point() const { return p_; }

private:
    const Jet<S>& var_jet(VarId v);
    const Jet<S>& factor_jet(std::uint32_t id);
    Jet<S> poly_jet(const Poly& p);

    PointSample p_;
    int order_;
    std::unordered_map<VarId, Jet<S>> vars_;
    std::unordered_map<std::uint32_t, Jet<S>> factors_;
    std::map<std::pair<VarId, int>, Jet<S>> powers_;
};

extern template class JetEvaluator<Gauss>;
extern template class JetEvaluator<Complex>;

Jet<Gauss> jet_of(const Expr& e, const PointSample& p);
Jet<Complex> jet_of_float(const Expr& e, const PointSample& p);
/// Exact value at the point (surrogates for relation-free indeterminates).
Gauss value_at(const Expr& e, const PointSample& p);

/// Values of every normal-form coefficient (35 slots) of [A, B] at the point,
/// computed by the Leibniz rule from coefficient jets (independent of compose()).
template <class S>
std::vector<S> commutator_coeffs_at(const DiffOp& A, const DiffOp& B, JetEvaluator<S>& ev);
/// Same for the product A o B (used for float normalization).
template <class S>
std::vector<S> product_coeffs_at(const DiffOp& A, const DiffOp& B, JetEvaluator<S>& ev);

struct OracleRow {
    std::string point;
    std::string slot;  // "d[a,b,c]"
    std::string value;
};

struct OracleResult {
    OraclePath path = OraclePath::Exact;
    int points_used = 0;
    mpq_class exact_max = 0;  // max over |re|, |im| of all coefficients (exact path)
    double float_max = 0.0;   // normalized max |coefficient| (float path)
    std::vector<OracleRow> nonzero;  // first few nonzero rows
    bool zero() const { return path == OraclePath::Exact ? exact_max == 0 : float_max <= 1e-10; }
};

/// Max residual of [H, Q] over n points (with bounded resampling on poles).
/// Throws SamplingExhausted if fewer than n valid points are found.
OracleResult residual_suite(const DiffOp& H, const DiffOp& Q, int n_points, OraclePath path,
                            std::uint64_t salt = 0, const std::map<std::string, double>& float_values = {});

}  // namespace pdm
