#include "pdm/gauss.hpp"

#include "pdm/errors.hpp"

#include <functional>

namespace pdm {

Gauss& Gauss::operator*=(const Gauss& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    mpq_class re = re_ * o.re_ - im_ * o.im_;
    mpq_class im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

Gauss& Gauss::operator/=(const Gauss& o) { return *this *= o.inverse(); }

Gauss Gauss::inverse() const {
    if (is_zero()) throw DivisionByZero("division by zero coefficient");
    if (sgn(im_) == 0) return Gauss(mpq_class(1) / re_);
    mpq_class n = norm();
    return Gauss(re_ / n, -im_ / n);
}

int Gauss::compare(const Gauss& a, const Gauss& b) {
    int c = cmp(a.re_, b.re_);
    if (c != 0) return c < 0 ? -1 : 1;
    c = cmp(a.im_, b.im_);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::size_t Gauss::hash() const {
    auto h = [](const mpq_class& q) {
        std::size_t s = mpz_get_ui(q.get_num_mpz_t()) * 1000003u + mpz_get_ui(q.get_den_mpz_t());
        return s ^ static_cast<std::size_t>(sgn(q) + 1);
    };
    return h(re_) * 31u + h(im_);
}

static std::string imag_part(const mpq_class& im) {
    if (im == 1) return "i";
    if (im == -1) return "-i";
    return im.get_str() + "*i";
}

std::string Gauss::str(bool parenthesize) const {
    if (sgn(im_) == 0) return re_.get_str();
    if (sgn(re_) == 0) return imag_part(im_);
    std::string s = re_.get_str();
    if (sgn(im_) < 0) {
        s += " - " + imag_part(-im_);
    } else {
        s += " + " + imag_part(im_);
    }
    return parenthesize ? "(" + s + ")" : s;
}

bool rational_sqrt(const mpq_class& v, mpq_class& out) {
    if (sgn(v) < 0) return false;
    if (!mpz_perfect_square_p(v.get_num_mpz_t()) || !mpz_perfect_square_p(v.get_den_mpz_t())) return false;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), v.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), v.get_den_mpz_t());
    out = mpq_class(n, d);
    out.canonicalize();
    return true;
}

}  // namespace pdm
