#include "pdm/poly.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <unordered_map>

namespace pdm {

namespace {
constexpr std::uint64_t kHigh = 0x8080808080808080ull;
}  // namespace

// ---------------------------------------------------------------- Monomial

void Monomial::set(VarId v, int e) {
    if (e < 0 || e > 127) throw Error("monomial exponent out of range: " + std::to_string(e));
    auto& w = w_[static_cast<std::size_t>(v >> 3)];
    w &= ~(0xffull << shift(v));
    w |= static_cast<std::uint64_t>(e) << shift(v);
}

int Monomial::total_degree() const {
    int s = 0;
    for (auto w : w_) {
        for (int b = 0; b < 8; ++b) s += static_cast<int>((w >> (8 * b)) & 0xffu);
    }
    return s;
}

std::uint64_t Monomial::support() const {
    std::uint64_t bits = 0;
    for (int i = 0; i < kWords; ++i) {
        const auto w = w_[static_cast<std::size_t>(i)];
        if (!w) continue;
        for (int b = 0; b < 8; ++b) {
            if ((w >> (8 * (7 - b))) & 0xffu) bits |= 1ull << (8 * i + b);
        }
    }
    return bits;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial m;
    for (int i = 0; i < kWords; ++i) {
        const auto s = w_[i] + o.w_[i];
        if (s & kHigh) throw Error("monomial exponent overflow (degree > 127)");
        m.w_[i] = s;
    }
    return m;
}

bool Monomial::divides(const Monomial& o) const {
    for (int i = 0; i < kWords; ++i) {
        if ((((o.w_[i] | kHigh) - w_[i]) & kHigh) != kHigh) return false;
    }
    return true;
}

Monomial Monomial::quotient_of(const Monomial& o) const {
    Monomial m;
    for (int i = 0; i < kWords; ++i) m.w_[i] = o.w_[i] - w_[i];
    return m;
}

Monomial Monomial::gcd(const Monomial& o) const {
    Monomial m;
    for (int i = 0; i < kWords; ++i) {
        // bytewise minimum: for each byte pick the smaller one
        const auto a = w_[i], b = o.w_[i];
        const auto ge = (((a | kHigh) - b) & kHigh) >> 7;  // 1 where a >= b
        const auto mask = ge * 0xffu;
        m.w_[i] = (b & mask) | (a & ~mask);
    }
    return m;
}

std::size_t Monomial::hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : w_) {
        h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::string monomial_str(const Monomial& m) {
    std::string s;
    const auto& reg = Registry::instance();
    const int n = reg.size();
    for (VarId v = 0; v < n; ++v) {
        const int e = m.exp(v);
        if (!e) continue;
        if (!s.empty()) s += "*";
        s += reg.name(v);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

// ---------------------------------------------------------------- Poly

Poly::Poly(const Gauss& c) {
    if (!c.is_zero()) terms_.push_back({Monomial(), c});
}

Poly Poly::var(VarId v, int e) { return monomial(Monomial::var(v, e), Gauss(1)); }

Poly Poly::monomial(const Monomial& m, const Gauss& c) {
    Poly p;
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.m > b.m; });
    Poly p;
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().m == t.m) {
            p.terms_.back().c += t.c;
            if (p.terms_.back().c.is_zero()) p.terms_.pop_back();
        } else if (!t.c.is_zero()) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

Gauss Poly::constant_value() const { return terms_.empty() ? Gauss() : terms_[0].c; }

int Poly::degree(VarId v) const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.m.exp(v));
    return d;
}

int Poly::min_degree(VarId v) const {
    if (terms_.empty()) return 0;
    int d = 127;
    for (const auto& t : terms_) d = std::min(d, t.m.exp(v));
    return d;
}

int Poly::total_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.m.total_degree());
    return d;
}

std::uint64_t Poly::support() const {
    std::uint64_t s = 0;
    for (const auto& t : terms_) s |= t.m.support();
    return s;
}

Monomial Poly::content() const {
    if (terms_.empty()) return {};
    Monomial g = terms_[0].m;
    for (const auto& t : terms_) g = g.gcd(t.m);
    return g;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.c = -t.c;
    return p;
}

namespace {
template <bool Subtract>
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].m > b[j].m)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].m > a[i].m) {
            out.push_back(Subtract ? Term{b[j].m, -b[j].c} : b[j]);
            ++j;
        } else {
            Gauss c = a[i].c;
            if (Subtract) {
                c -= b[j].c;
            } else {
                c += b[j].c;
            }
            if (!c.is_zero()) out.push_back({a[i].m, std::move(c)});
            ++i;
            ++j;
        }
    }
    return out;
}
}  // namespace

Poly& Poly::operator+=(const Poly& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) return *this = o;
    terms_ = merge<false>(terms_, o.terms_);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.terms_.empty()) return *this;
    terms_ = merge<true>(terms_, o.terms_);
    return *this;
}

Poly Poly::scaled(const Gauss& c) const {
    if (c.is_zero()) return {};
    if (c.is_one()) return *this;
    Poly p = *this;
    for (auto& t : p.terms_) t.c *= c;
    return p;
}

Poly Poly::shifted(const Monomial& m) const {
    Poly p = *this;
    for (auto& t : p.terms_) t.m = t.m * m;
    return p;
}

Poly Poly::divided_by(const Monomial& m) const {
    Poly p = *this;
    for (auto& t : p.terms_) t.m = m.quotient_of(t.m);
    return p;
}

Poly Poly::multiply_raw(const Poly& a, const Poly& b) {
    if (a.terms_.empty() || b.terms_.empty()) return {};
    if (a.terms_.size() == 1) return b.shifted(a.terms_[0].m).scaled(a.terms_[0].c);
    if (b.terms_.size() == 1) return a.shifted(b.terms_[0].m).scaled(b.terms_[0].c);
    std::unordered_map<Monomial, Gauss, MonomialHash> acc;
    acc.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            auto [it, inserted] = acc.try_emplace(s.m * t.m);
            if (inserted) {
                it->second = s.c;
                it->second *= t.c;
            } else {
                it->second += s.c * t.c;
            }
        }
    }
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [m, c] : acc) {
        if (!c.is_zero()) terms.push_back({m, std::move(c)});
    }
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.m > y.m; });
    Poly p;
    p.terms_ = std::move(terms);
    return p;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly p = Poly::multiply_raw(a, b);
    constexpr std::uint64_t radicals = (1ull << var::r) | (1ull << var::rt);
    if ((a.support() & radicals) && (b.support() & radicals)) return p.reduced();
    return p;
}

namespace {
Poly cached_power(const Poly& base, std::vector<Poly>& cache, std::mutex& mu, int k) {
    std::lock_guard lock(mu);
    if (cache.empty()) cache.emplace_back(1);
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * base);
    return cache[static_cast<std::size_t>(k)];
}
}  // namespace

const Poly& Poly::r_squared() {
    static const Poly p = var(var::x1, 2) + var(var::x2, 2) + var(var::x3, 2);
    return p;
}

const Poly& Poly::rt_squared() {
    static const Poly p = var(var::x1, 2) + var(var::x2, 2);
    return p;
}

Poly Poly::reduced() const {
    bool needed = false;
    for (const auto& t : terms_) {
        if (t.m.exp(var::r) >= 2 || t.m.exp(var::rt) >= 2) {
            needed = true;
            break;
        }
    }
    if (!needed) return *this;
    static std::vector<Poly> rcache, rtcache;
    static std::mutex rmu, rtmu;
    std::vector<Term> out;
    for (const auto& t : terms_) {
        const int er = t.m.exp(var::r), et = t.m.exp(var::rt);
        if (er < 2 && et < 2) {
            out.push_back(t);
            continue;
        }
        Monomial base = t.m;
        base.set(var::r, er % 2);
        base.set(var::rt, et % 2);
        Poly factor = cached_power(r_squared(), rcache, rmu, er / 2);
        if (et >= 2) factor = multiply_raw(factor, cached_power(rt_squared(), rtcache, rtmu, et / 2));
        for (const auto& u : factor.terms_) out.push_back({u.m * base, u.c * t.c});
    }
    return from_terms(std::move(out));
}

std::optional<Poly> Poly::divexact(const Poly& d) const {
    if (d.is_zero()) throw DivisionByZero("polynomial division by zero");
    if (is_zero()) return Poly();
    if (!d.leading().m.divides(leading().m) || !d.trailing().m.divides(trailing().m)) return std::nullopt;
    const auto dsup = d.support();
    for (VarId v = 0; v < kMaxVars; ++v) {
        if (!((dsup >> v) & 1u)) continue;
        if (d.degree(v) > degree(v) || d.min_degree(v) > min_degree(v)) return std::nullopt;
    }
    const Gauss inv_lead = d.leading().c.inverse();
    if (d.size() == 1) {
        Poly q;
        q.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!d.leading().m.divides(t.m)) return std::nullopt;
            q.terms_.push_back({d.leading().m.quotient_of(t.m), t.c * inv_lead});
        }
        return q;
    }
    std::map<Monomial, Gauss, std::greater<>> rem;
    for (const auto& t : terms_) rem.emplace(t.m, t.c);
    Poly q;
    while (!rem.empty()) {
        auto it = rem.begin();
        if (!d.leading().m.divides(it->first)) return std::nullopt;
        const Monomial qm = d.leading().m.quotient_of(it->first);
        const Gauss qc = it->second * inv_lead;
        rem.erase(it);
        for (std::size_t k = 1; k < d.terms_.size(); ++k) {
            const auto& t = d.terms_[k];
            const Monomial m = t.m * qm;
            auto [pos, inserted] = rem.try_emplace(m);
            if (inserted) {
                pos->second = -(t.c * qc);
            } else {
                pos->second -= t.c * qc;
                if (pos->second.is_zero()) rem.erase(pos);
            }
        }
        q.terms_.push_back({qm, qc});
        if (q.terms_.size() > terms_.size() + 1) return std::nullopt;
    }
    return q;
}

Poly Poly::diff(VarId v) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        const int e = t.m.exp(v);
        if (!e) continue;
        Monomial m = t.m;
        m.set(v, e - 1);
        out.push_back({m, t.c * Gauss(e)});
    }
    Poly p;
    p.terms_ = std::move(out);  // order preserved: lowering one exponent keeps lex order
    return p;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].m != b.terms_[i].m || a.terms_[i].c != b.terms_[i].c) return false;
    }
    return true;
}

int Poly::compare(const Poly& a, const Poly& b) {
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.terms_[i].m != b.terms_[i].m) return a.terms_[i].m > b.terms_[i].m ? 1 : -1;
        if (int c = Gauss::compare(a.terms_[i].c, b.terms_[i].c)) return c;
    }
    if (a.terms_.size() == b.terms_.size()) return 0;
    return a.terms_.size() > b.terms_.size() ? 1 : -1;
}

std::size_t Poly::hash() const {
    std::size_t h = terms_.size();
    for (const auto& t : terms_) h = h * 1000003u ^ (t.m.hash() + 31u * t.c.hash());
    return h;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : terms_) {
        const std::string mono = monomial_str(t.m);
        Gauss c = t.c;
        bool negative = false;
        if (c.is_real() ? sgn(c.re()) < 0 : (sgn(c.re()) == 0 && sgn(c.im()) < 0)) {
            negative = true;
            c = -c;
        }
        std::string body;
        if (mono.empty()) {
            body = c.str(true);
        } else if (c.is_one()) {
            body = mono;
        } else {
            body = c.str(true) + "*" + mono;
        }
        if (first) {
            s = negative ? "-" + body : body;
        } else {
            s += negative ? " - " + body : " + " + body;
        }
        first = false;
    }
    return s;
}

}  // namespace pdm
