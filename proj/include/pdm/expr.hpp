#pragma once

// Exact expressions: a numerator polynomial over a denominator that is a
// product of registered monic factor polynomials. Denominators are kept free
// of the radicals r and rt (rationalized by conjugation), numerators carry r
// and rt with degree <= 1. Expr values are immutable once built and safe to
// share between threads; the factor table is internally synchronized.

#include "pdm/poly.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pdm {

struct DenFactor {
    std::uint32_t id;  // index into the factor table
    int exp;           // > 0
    friend bool operator==(const DenFactor&, const DenFactor&) = default;
};

class Expr {
public:
    Expr() = default;
    Expr(long c) : num_(c) {}  // NOLINT(google-explicit-constructor)
    Expr(const Gauss& c) : num_(c) {}  // NOLINT(google-explicit-constructor)
    Expr(Poly p) : num_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

    static Expr var(VarId v) { return Expr(Poly::var(v)); }
    /// Coordinate x_a for a = 1..3.
    static Expr x(int a) { return var(a - 1); }
    static Expr r() { return var(var::r); }
    static Expr rt() { return var(var::rt); }
    static Expr phi() { return var(var::phi); }
    static Expr theta() { return var(var::theta); }
    static Expr lrt() { return var(var::lrt); }
    static Expr i() { return Expr(Gauss::i()); }
    static Expr param(const std::string& name) { return var(Registry::instance().param(name)); }
    static Expr rational(long p, long q) { return Expr(Gauss::frac(p, q)); }
    /// num / den, rationalized and reduced. Throws DivisionByZero if den == 0.
    static Expr fraction(const Poly& num, const Poly& den);

    const Poly& num() const { return num_; }
    const std::vector<DenFactor>& den() const { return den_; }
    /// The denominator as an expanded polynomial.
    Poly den_poly() const;

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.empty(); }
    bool is_constant() const { return den_.empty() && num_.is_constant(); }
    Gauss constant_value() const { return num_.constant_value(); }
    std::uint64_t support() const;
    bool uses(VarId v) const { return (support() >> v) & 1u; }
    /// Rough size measure (numerator terms + denominator terms).
    std::size_t complexity() const;

    Expr operator-() const;
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr& operator/=(const Expr& o) { return *this = *this / o; }
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b) { return a * b.inverse(); }
    Expr inverse() const;
    Expr pow(int n) const;

    /// Mathematical equality (difference is identically zero).
    friend bool operator==(const Expr& a, const Expr& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
    /// Same stored representation (stronger than ==).
    bool identical(const Expr& o) const { return num_ == o.num_ && den_ == o.den_; }

    /// Debug rendering "(num)/[factor^e...]"; use print() for the grammar form.
    std::string debug_str() const;

private:
    Poly num_;
    std::vector<DenFactor> den_;  // sorted by id

    friend class ExprAccess;
};

/// Partial derivative with respect to x_a, a = 1..3, using the generator rules.
Expr differentiate(const Expr& e, int a);

/// Canonical-form check for tests: re-canonicalizing yields the same representation.
Expr canonicalize(const Expr& e);

using Bindings = std::map<VarId, Expr>;

/// Simultaneous substitution of indeterminates. When coordinates are bound to
/// constants, r and rt must be bound consistently or be rational at the point
/// (they are then derived); otherwise InconsistentPoint is thrown.
Expr substitute(const Expr& e, const Bindings& b);

/// Fast evaluation when every indeterminate of `e` is bound to a constant.
/// Throws DivisionByZero on a pole.
Gauss evaluate(const Expr& e, const std::vector<Gauss>& values, std::uint64_t bound_mask);

/// Gradient (d/dx1, d/dx2, d/dx3) of a non-coordinate indeterminate.
const std::array<Expr, 3>& generator_gradient(VarId v);

/// A relation-free exponential generator w = exp(sum_k coeff_k * base_k)
/// with base_k in {lrt, phi, theta}; coefficients may contain parameters.
struct ExpGenerator {
    std::string name;
    std::vector<std::pair<Expr, VarId>> exponent;
    std::string relation;  // metadata, e.g. "t^5 = rt^2"
};
VarId register_exp_generator(const ExpGenerator& g);
/// Exponent data of a registered exponential generator (empty for others).
const ExpGenerator* exp_generator(VarId v);

/// Factor-table access (ids are process-local; never print them).
const Poly& factor_poly(std::uint32_t id);
std::size_t factor_count();

}  // namespace pdm
