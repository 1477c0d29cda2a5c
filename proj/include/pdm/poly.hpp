#pragma once

// Sparse multivariate polynomials over Q(i) in the registry's indeterminates.
// Monomials pack one 7-bit exponent per variable into bytes of 64-bit words,
// most significant byte first, so comparing words lexicographically is the
// lex monomial order with x1 > x2 > x3 > r > rt > ... .

#include "pdm/gauss.hpp"
#include "pdm/symbols.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

class Monomial {
public:
    static constexpr int kWords = kMaxVars / 8;

    Monomial() = default;
    static Monomial var(VarId v, int e = 1) {
        Monomial m;
        m.set(v, e);
        return m;
    }

    int exp(VarId v) const {
        return static_cast<int>((w_[static_cast<std::size_t>(v >> 3)] >> shift(v)) & 0xffu);
    }
    void set(VarId v, int e);

    bool is_one() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }
    int total_degree() const;
    /// Bit v set iff exp(v) > 0.
    std::uint64_t support() const;

    Monomial operator*(const Monomial& o) const;
    /// True iff this monomial divides `o`.
    bool divides(const Monomial& o) const;
    /// Precondition: divides(o). Returns o / *this.
    Monomial quotient_of(const Monomial& o) const;
    Monomial gcd(const Monomial& o) const;

    friend bool operator==(const Monomial& a, const Monomial& b) = default;
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
        for (int i = 0; i < kWords; ++i) {
            if (a.w_[i] != b.w_[i]) return a.w_[i] < b.w_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }
    std::size_t hash() const;

private:
    static unsigned shift(VarId v) { return 8u * (7u - static_cast<unsigned>(v & 7)); }
    std::array<std::uint64_t, kWords> w_{};
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct Term {
    Monomial m;
    Gauss c;
};

class Poly {
public:
    Poly() = default;
    Poly(const Gauss& c);  // NOLINT(google-explicit-constructor)
    Poly(long c) : Poly(Gauss(c)) {}  // NOLINT(google-explicit-constructor)
    static Poly var(VarId v, int e = 1);
    static Poly monomial(const Monomial& m, const Gauss& c);
    /// Builds from unsorted terms, combining duplicates and dropping zeros.
    static Poly from_terms(std::vector<Term> terms);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
    Gauss constant_value() const;  // precondition: is_constant()
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }
    const Term& leading() const { return terms_.front(); }
    const Term& trailing() const { return terms_.back(); }

    int degree(VarId v) const;
    int min_degree(VarId v) const;
    int total_degree() const;
    std::uint64_t support() const;
    bool uses(VarId v) const { return (support() >> v) & 1u; }
    Monomial content() const;  // gcd of all monomials

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    /// Product reduced modulo r^2 = x1^2+x2^2+x3^2 and rt^2 = x1^2+x2^2.
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Gauss& c) const;
    Poly shifted(const Monomial& m) const;
    /// Exact quotient by a monomial; precondition: it divides every term.
    Poly divided_by(const Monomial& m) const;

    /// Exact division in the free polynomial ring; nullopt if `d` does not
    /// divide. `d` must not be zero.
    std::optional<Poly> divexact(const Poly& d) const;

    /// Formal partial derivative with respect to indeterminate v.
    Poly diff(VarId v) const;

    /// Reduces r and rt to degree <= 1 using their defining relations.
    Poly reduced() const;

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    /// Deterministic total order (by terms) used for printing.
    static int compare(const Poly& a, const Poly& b);
    std::size_t hash() const;

    /// Plain-text rendering, e.g. "x1^2 + 3/2*x2*r - i".
    std::string str() const;

    /// r^2 and rt^2 as polynomials in the coordinates.
    static const Poly& r_squared();
    static const Poly& rt_squared();

private:
    static Poly multiply_raw(const Poly& a, const Poly& b);
    std::vector<Term> terms_;  // strictly decreasing monomials, nonzero coefficients
};

std::string monomial_str(const Monomial& m);

}  // namespace pdm
