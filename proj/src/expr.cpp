#include "pdm/expr.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace pdm {

// ---------------------------------------------------------------- factor table

namespace {

class FactorTable {
public:
    static FactorTable& instance() {
        static FactorTable t;
        return t;
    }

    const Poly& poly(std::uint32_t id) const {
        std::shared_lock lock(mu_);
        return polys_[id];
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return polys_.size();
    }

    const Poly& power(std::uint32_t id, int k) {
        const auto key = std::make_pair(id, k);
        {
            std::shared_lock lock(mu_);
            if (auto it = powers_.find(key); it != powers_.end()) return it->second;
        }
        Poly p = k == 1 ? poly(id) : power(id, k / 2) * power(id, k - k / 2);
        std::unique_lock lock(mu_);
        return powers_.try_emplace(key, std::move(p)).first->second;
    }

    const std::array<Expr, 3>* cached_gradient(std::uint32_t id) const {
        std::shared_lock lock(mu_);
        auto it = gradients_.find(id);
        return it == gradients_.end() ? nullptr : &it->second;
    }
    const std::array<Expr, 3>& store_gradient(std::uint32_t id, std::array<Expr, 3> g) {
        std::unique_lock lock(mu_);
        return gradients_.try_emplace(id, std::move(g)).first->second;
    }

    /// Splits a nonzero r/rt-free polynomial into unit * prod factor^exp.
    std::vector<DenFactor> factorize(const Poly& p, Gauss& unit) {
        const Monomial content = p.content();
        Poly q = content.is_one() ? p : p.divided_by(content);
        unit = q.leading().c;
        if (!unit.is_one()) q = q.scaled(unit.inverse());
        std::map<std::uint32_t, int> exps;
        for (VarId v = 0; v < kMaxVars; ++v) {
            if (const int e = content.exp(v)) exps[intern(Poly::var(v))] += e;
        }
        while (!q.is_constant()) {
            if (auto id = lookup(q)) {
                ++exps[*id];
                break;
            }
            bool divided = false;
            const std::size_t n = size();
            const auto qsup = q.support();
            const int qdeg = q.total_degree();
            for (std::uint32_t id = 0; id < n && !divided; ++id) {
                const Poly& f = poly(id);
                if ((f.support() & ~qsup) || f.total_degree() > qdeg || f.size() < 2) continue;
                if (auto quotient = q.divexact(f)) {
                    q = std::move(*quotient);
                    ++exps[id];
                    divided = true;
                }
            }
            if (!divided) {
                ++exps[intern(q)];
                break;
            }
        }
        std::vector<DenFactor> out;
        for (auto [id, e] : exps) out.push_back({id, e});
        return out;
    }

private:
    std::optional<std::uint32_t> lookup(const Poly& p) const {
        std::shared_lock lock(mu_);
        return lookup_locked(p);
    }
    std::optional<std::uint32_t> lookup_locked(const Poly& p) const {
        auto [lo, hi] = by_hash_.equal_range(p.hash());
        for (auto it = lo; it != hi; ++it) {
            if (polys_[it->second] == p) return it->second;
        }
        return std::nullopt;
    }
    std::uint32_t intern(const Poly& p) {
        std::unique_lock lock(mu_);
        if (auto id = lookup_locked(p)) return *id;
        const auto id = static_cast<std::uint32_t>(polys_.size());
        polys_.push_back(p);
        by_hash_.emplace(p.hash(), id);
        return id;
    }

    mutable std::shared_mutex mu_;
    std::deque<Poly> polys_;
    std::unordered_multimap<std::size_t, std::uint32_t> by_hash_;
    std::map<std::pair<std::uint32_t, int>, Poly> powers_;
    std::map<std::uint32_t, std::array<Expr, 3>> gradients_;
};

constexpr std::uint64_t kRadicals = (1ull << var::r) | (1ull << var::rt);

/// Replaces v by -v (conjugation with respect to a radical).
Poly conjugate(const Poly& p, VarId v) {
    std::vector<Term> terms;
    for (const auto& t : p.terms()) terms.push_back({t.m, t.m.exp(v) % 2 ? -t.c : t.c});
    return Poly::from_terms(std::move(terms));
}

}  // namespace

const Poly& factor_poly(std::uint32_t id) { return FactorTable::instance().poly(id); }
std::size_t factor_count() { return FactorTable::instance().size(); }

// ---------------------------------------------------------------- internals

class ExprAccess {
public:
    static Expr make(Poly num, std::vector<DenFactor> den) {
        Expr e;
        e.num_ = std::move(num);
        if (!e.num_.is_zero()) e.den_ = std::move(den);
        return e;
    }
    static Poly& num(Expr& e) { return e.num_; }
    static std::vector<DenFactor>& den(Expr& e) { return e.den_; }

    /// Removes factors of `den` dividing `num`; only ids accepted by `pick`.
    template <class Pick>
    static void cancel(Poly& num, std::vector<DenFactor>& den, Pick pick) {
        if (num.is_zero()) {
            den.clear();
            return;
        }
        for (auto& f : den) {
            if (!pick(f.id)) continue;
            const Poly& q = factor_poly(f.id);
            while (f.exp > 0) {
                auto quotient = num.divexact(q);
                if (!quotient) break;
                num = std::move(*quotient);
                --f.exp;
            }
        }
        std::erase_if(den, [](const DenFactor& f) { return f.exp == 0; });
    }
};

Expr Expr::fraction(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw DivisionByZero("identically zero denominator");
    if (num.is_zero()) return Expr();
    Poly n = num.reduced(), d = den.reduced();
    if (d.is_constant()) return Expr(n.scaled(d.constant_value().inverse()));
    for (VarId v : {var::r, var::rt}) {
        if (!d.uses(v)) continue;
        const Poly c = conjugate(d, v);
        n = n * c;
        d = d * c;
        if (d.is_zero()) throw DivisionByZero("identically zero denominator");
    }
    if (d.is_constant()) return Expr(n.scaled(d.constant_value().inverse()));
    Gauss unit;
    auto facs = FactorTable::instance().factorize(d, unit);
    n = n.scaled(unit.inverse());
    ExprAccess::cancel(n, facs, [](std::uint32_t) { return true; });
    return ExprAccess::make(std::move(n), std::move(facs));
}

Poly Expr::den_poly() const {
    Poly p(1);
    for (const auto& f : den_) p = p * FactorTable::instance().power(f.id, f.exp);
    return p;
}

std::uint64_t Expr::support() const {
    std::uint64_t s = num_.support();
    for (const auto& f : den_) s |= factor_poly(f.id).support();
    return s;
}

std::size_t Expr::complexity() const {
    std::size_t n = num_.size();
    for (const auto& f : den_) n += factor_poly(f.id).size() * static_cast<std::size_t>(f.exp);
    return n;
}

Expr Expr::operator-() const {
    Expr e = *this;
    e.num_ = -e.num_;
    return e;
}

namespace {

template <bool Subtract>
Expr add_impl(const Expr& a, const Expr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return Subtract ? -b : b;
    if (a.den() == b.den()) {
        Poly n = Subtract ? a.num() - b.num() : a.num() + b.num();
        auto den = a.den();
        ExprAccess::cancel(n, den, [](std::uint32_t) { return true; });
        return ExprAccess::make(std::move(n), std::move(den));
    }
    auto& table = FactorTable::instance();
    std::vector<DenFactor> den;
    std::vector<std::uint32_t> common;
    Poly ma(1), mb(1);
    std::size_t i = 0, j = 0;
    const auto& da = a.den();
    const auto& db = b.den();
    while (i < da.size() || j < db.size()) {
        if (j == db.size() || (i < da.size() && da[i].id < db[j].id)) {
            den.push_back(da[i]);
            mb = mb * table.power(da[i].id, da[i].exp);
            ++i;
        } else if (i == da.size() || db[j].id < da[i].id) {
            den.push_back(db[j]);
            ma = ma * table.power(db[j].id, db[j].exp);
            ++j;
        } else {
            const int e = std::max(da[i].exp, db[j].exp);
            den.push_back({da[i].id, e});
            common.push_back(da[i].id);
            if (e > da[i].exp) ma = ma * table.power(da[i].id, e - da[i].exp);
            if (e > db[j].exp) mb = mb * table.power(db[j].id, e - db[j].exp);
            ++i;
            ++j;
        }
    }
    Poly n = a.num() * ma;
    if (Subtract) {
        n -= b.num() * mb;
    } else {
        n += b.num() * mb;
    }
    ExprAccess::cancel(n, den, [&](std::uint32_t id) {
        return std::find(common.begin(), common.end(), id) != common.end();
    });
    return ExprAccess::make(std::move(n), std::move(den));
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return add_impl<false>(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return add_impl<true>(a, b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_constant()) {
        if (a.constant_value().is_one()) return b;
        return ExprAccess::make(b.num().scaled(a.constant_value()), b.den());
    }
    if (b.is_constant()) {
        if (b.constant_value().is_one()) return a;
        return ExprAccess::make(a.num().scaled(b.constant_value()), a.den());
    }
    Poly na = a.num(), nb = b.num();
    auto dena = a.den(), denb = b.den();
    // cross cancellation before multiplying
    ExprAccess::cancel(na, denb, [](std::uint32_t) { return true; });
    ExprAccess::cancel(nb, dena, [](std::uint32_t) { return true; });
    Poly n = na * nb;
    std::vector<DenFactor> den;
    std::size_t i = 0, j = 0;
    while (i < dena.size() || j < denb.size()) {
        if (j == denb.size() || (i < dena.size() && dena[i].id < denb[j].id)) {
            den.push_back(dena[i++]);
        } else if (i == dena.size() || denb[j].id < dena[i].id) {
            den.push_back(denb[j++]);
        } else {
            den.push_back({dena[i].id, dena[i].exp + denb[j].exp});
            ++i;
            ++j;
        }
    }
    if ((na.support() & kRadicals) && (nb.support() & kRadicals) && !den.empty()) {
        // relation reduction may have produced a denominator factor
        ExprAccess::cancel(n, den, [](std::uint32_t) { return true; });
    }
    return ExprAccess::make(std::move(n), std::move(den));
}

Expr Expr::inverse() const {
    if (is_zero()) throw DivisionByZero("inverse of zero expression");
    return fraction(den_poly(), num_);
}

Expr Expr::pow(int n) const {
    if (n < 0) return inverse().pow(-n);
    Expr result(1), base = *this;
    while (n) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n) base *= base;
    }
    return result;
}

std::string Expr::debug_str() const {
    std::string s = "(" + num_.str() + ")";
    if (den_.empty()) return s;
    s += "/[";
    for (std::size_t k = 0; k < den_.size(); ++k) {
        if (k) s += " * ";
        s += "(" + factor_poly(den_[k].id).str() + ")^" + std::to_string(den_[k].exp);
    }
    return s + "]";
}

Expr canonicalize(const Expr& e) { return Expr::fraction(e.num(), e.den_poly()); }

// ---------------------------------------------------------------- generators

namespace {

struct GeneratorTable {
    std::array<std::array<Expr, 3>, kMaxVars> grad;
    std::array<ExpGenerator, kMaxVars> exps;
    std::array<bool, kMaxVars> is_exp{};

    GeneratorTable() {
        const Expr x1 = Expr::x(1), x2 = Expr::x(2), x3 = Expr::x(3);
        const Expr r = Expr::r(), rt = Expr::rt();
        const Expr r2 = Expr(Poly::r_squared()), rt2 = Expr(Poly::rt_squared());
        grad[var::r] = {x1 / r, x2 / r, x3 / r};
        grad[var::rt] = {x1 / rt, x2 / rt, Expr()};
        grad[var::phi] = {-x2 / rt2, x1 / rt2, Expr()};
        grad[var::theta] = {x1 * x3 / (rt * r2), x2 * x3 / (rt * r2), -rt / r2};
        grad[var::lrt] = {x1 / rt2, x2 / rt2, Expr()};
    }
};

GeneratorTable& generators() {
    static GeneratorTable t;
    return t;
}

}  // namespace

const std::array<Expr, 3>& generator_gradient(VarId v) { return generators().grad[static_cast<std::size_t>(v)]; }

const ExpGenerator* exp_generator(VarId v) {
    auto& t = generators();
    return t.is_exp[static_cast<std::size_t>(v)] ? &t.exps[static_cast<std::size_t>(v)] : nullptr;
}

VarId register_exp_generator(const ExpGenerator& g) {
    auto& table = generators();
    std::array<Expr, 3> log_grad{};
    for (const auto& [c, base] : g.exponent) {
        if (base != var::lrt && base != var::phi && base != var::theta)
            throw UnsupportedExpression("exponential generator '" + g.name + "' must be built from lrt, phi, theta");
        for (int a = 0; a < 3; ++a) log_grad[a] += c * generator_gradient(base)[a];
    }
    std::string relation = g.relation;
    if (relation.empty()) {
        relation = "exp(";
        for (std::size_t k = 0; k < g.exponent.size(); ++k) {
            if (k) relation += " + ";
            relation += g.exponent[k].first.debug_str() + "*" + Registry::instance().name(g.exponent[k].second);
        }
        relation += ")";
    }
    return Registry::instance().add_generator(g.name, VarKind::Exp, relation, [&](VarId id) {
        const Expr w = Expr::var(id);
        for (int a = 0; a < 3; ++a) table.grad[static_cast<std::size_t>(id)][a] = log_grad[a] * w;
        table.exps[static_cast<std::size_t>(id)] = g;
        table.is_exp[static_cast<std::size_t>(id)] = true;
    });
}

// ---------------------------------------------------------------- differentiation

namespace {

/// Total derivative d/dx_a of a polynomial in coordinates and generators.
Expr diff_poly(const Poly& p, int a) {
    Expr out(p.diff(a - 1));
    const auto sup = p.support();
    for (VarId v = var::x3 + 1; v < kMaxVars; ++v) {
        if (!((sup >> v) & 1u)) continue;
        const Expr& g = generator_gradient(v)[static_cast<std::size_t>(a - 1)];
        if (g.is_zero()) continue;
        out += Expr(p.diff(v)) * g;
    }
    return out;
}

const std::array<Expr, 3>& factor_gradient(std::uint32_t id) {
    auto& table = FactorTable::instance();
    if (auto* g = table.cached_gradient(id)) return *g;
    const Poly& q = factor_poly(id);
    std::array<Expr, 3> g{diff_poly(q, 1), diff_poly(q, 2), diff_poly(q, 3)};
    return table.store_gradient(id, std::move(g));
}

}  // namespace

Expr differentiate(const Expr& e, int a) {
    if (a < 1 || a > 3) throw Error("axis index must be 1..3");
    Expr dn = diff_poly(e.num(), a);
    if (e.den().empty()) return dn;
    Expr s;
    for (const auto& f : e.den()) {
        const Expr& dq = factor_gradient(f.id)[static_cast<std::size_t>(a - 1)];
        if (dq.is_zero()) continue;
        s += Expr(f.exp) * dq * ExprAccess::make(Poly(1), {{f.id, 1}});
    }
    return (dn - Expr(e.num()) * s) * ExprAccess::make(Poly(1), e.den());
}

// ---------------------------------------------------------------- substitution

Gauss evaluate(const Expr& e, const std::vector<Gauss>& values, std::uint64_t bound_mask) {
    if ((e.support() & ~bound_mask) != 0) throw Error("evaluate: unbound indeterminate");
    auto eval_poly = [&](const Poly& p) {
        Gauss acc;
        const auto sup = p.support();
        // cache powers lazily
        std::array<std::vector<Gauss>, kMaxVars> pw;
        for (const auto& t : p.terms()) {
            Gauss term = t.c;
            for (VarId v = 0; v < kMaxVars; ++v) {
                if (!((sup >> v) & 1u)) continue;
                const int k = t.m.exp(v);
                if (!k) continue;
                auto& cache = pw[static_cast<std::size_t>(v)];
                if (cache.empty()) cache.push_back(Gauss(1));
                while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * values[static_cast<std::size_t>(v)]);
                term *= cache[static_cast<std::size_t>(k)];
            }
            acc += term;
        }
        return acc;
    };
    Gauss n = eval_poly(e.num());
    if (e.den().empty()) return n;
    Gauss d(1);
    for (const auto& f : e.den()) {
        const Gauss q = eval_poly(factor_poly(f.id));
        if (q.is_zero()) throw DivisionByZero("denominator vanishes at evaluation point");
        for (int k = 0; k < f.exp; ++k) d *= q;
    }
    return n / d;
}

namespace {

Expr substitute_poly(const Poly& p, const Bindings& b) {
    const auto sup = p.support();
    std::array<std::vector<Expr>, kMaxVars> pw;
    Poly poly_part;
    Expr rest;
    for (const auto& t : p.terms()) {
        Monomial kept;
        Expr factor(t.c);
        bool rational = true;
        for (VarId v = 0; v < kMaxVars; ++v) {
            if (!((sup >> v) & 1u)) continue;
            const int k = t.m.exp(v);
            if (!k) continue;
            auto it = b.find(v);
            if (it == b.end()) {
                kept.set(v, k);
                continue;
            }
            auto& cache = pw[static_cast<std::size_t>(v)];
            if (cache.empty()) cache.push_back(Expr(1));
            while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * it->second);
            factor *= cache[static_cast<std::size_t>(k)];
            if (!it->second.is_polynomial()) rational = false;
        }
        factor *= Expr(Poly::monomial(kept, Gauss(1)));
        if (rational && factor.is_polynomial()) {
            poly_part += factor.num();
        } else {
            rest += factor;
        }
    }
    return Expr(poly_part.reduced()) + rest;
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) {
    Bindings b = bindings;
    const auto sup = e.support();
    const bool any_coord = b.count(var::x1) || b.count(var::x2) || b.count(var::x3);
    if (any_coord) {
        auto const_of = [&](VarId v, mpq_class& out) {
            auto it = b.find(v);
            if (it == b.end() || !it->second.is_constant() || !it->second.constant_value().is_real()) return false;
            out = it->second.constant_value().re();
            return true;
        };
        mpq_class x[3];
        const bool numeric = const_of(var::x1, x[0]) && const_of(var::x2, x[1]) && const_of(var::x3, x[2]);
        const mpq_class sq[2] = {x[0] * x[0] + x[1] * x[1] + x[2] * x[2], x[0] * x[0] + x[1] * x[1]};
        const VarId rad[2] = {var::r, var::rt};
        for (int k = 0; k < 2; ++k) {
            const VarId v = rad[k];
            auto it = b.find(v);
            if (it != b.end()) {
                mpq_class val;
                if (numeric && const_of(v, val) && (val * val != sq[k] || sgn(val) < 0))
                    throw InconsistentPoint(Registry::instance().name(v) + " binding inconsistent with coordinates");
                continue;
            }
            if (!((sup >> v) & 1u)) continue;
            if (!numeric)
                throw UnsupportedExpression("symbolic coordinate substitution requires an explicit binding for " +
                                            Registry::instance().name(v));
            mpq_class root;
            if (!rational_sqrt(sq[k], root))
                throw InconsistentPoint(Registry::instance().name(v) + " is irrational at the point");
            b[v] = Expr(Gauss(root));
        }
    }
    // constant fast path
    std::uint64_t bound = 0;
    bool all_const = true;
    std::vector<Gauss> values(kMaxVars);
    for (const auto& [v, ex] : b) {
        bound |= 1ull << v;
        if (ex.is_constant()) {
            values[static_cast<std::size_t>(v)] = ex.constant_value();
        } else if ((sup >> v) & 1u) {
            all_const = false;
        }
    }
    if (all_const && (sup & ~bound) == 0) return Expr(evaluate(e, values, bound));

    Expr n = substitute_poly(e.num(), b);
    if (e.den().empty()) return n;
    Expr d(1);
    for (const auto& f : e.den()) {
        Expr q = substitute_poly(factor_poly(f.id), b);
        if (q.is_zero()) throw DivisionByZero("denominator vanishes after substitution");
        d *= q.pow(f.exp);
    }
    return n / d;
}

}  // namespace pdm
