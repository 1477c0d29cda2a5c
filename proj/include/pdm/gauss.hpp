#pragma once

// Exact Gaussian rationals a + b*i with a, b in Q (GMP rationals).

#include <gmpxx.h>

#include <cstddef>
#include <string>

namespace pdm {

class Gauss {
public:
    Gauss() = default;
    Gauss(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
    Gauss(const mpq_class& re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    Gauss(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {}

    static Gauss i() { return Gauss(mpq_class(0), mpq_class(1)); }
    static Gauss frac(long p, long q) {
        mpq_class v(p, q);
        v.canonicalize();
        return Gauss(v);
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return sgn(im_) == 0 && re_ == 1; }

    Gauss conj() const { return Gauss(re_, -im_); }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    Gauss& operator+=(const Gauss& o) {
        re_ += o.re_;
        if (sgn(o.im_) != 0) im_ += o.im_;
        return *this;
    }
    Gauss& operator-=(const Gauss& o) {
        re_ -= o.re_;
        if (sgn(o.im_) != 0) im_ -= o.im_;
        return *this;
    }
    Gauss& operator*=(const Gauss& o);
    Gauss& operator/=(const Gauss& o);

    friend Gauss operator+(Gauss a, const Gauss& b) { return a += b; }
    friend Gauss operator-(Gauss a, const Gauss& b) { return a -= b; }
    friend Gauss operator*(Gauss a, const Gauss& b) { return a *= b; }
    friend Gauss operator/(Gauss a, const Gauss& b) { return a /= b; }
    Gauss operator-() const { return Gauss(-re_, -im_); }

    friend bool operator==(const Gauss& a, const Gauss& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Gauss& a, const Gauss& b) { return !(a == b); }

    /// Multiplicative inverse; throws DivisionByZero on zero.
    Gauss inverse() const;

    /// Total order used only for deterministic sorting (re first, then im).
    static int compare(const Gauss& a, const Gauss& b);

    std::size_t hash() const;

    /// "3/2", "-i", "(1/2 + 3*i)"; `parenthesize` wraps sums.
    std::string str(bool parenthesize = false) const;

    double real_double() const { return re_.get_d(); }
    double imag_double() const { return im_.get_d(); }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

/// Exact rational square root, if it exists.
bool rational_sqrt(const mpq_class& v, mpq_class& out);

}  // namespace pdm
