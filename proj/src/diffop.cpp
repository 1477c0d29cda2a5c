#include "pdm/diffop.hpp"
#include "pdm/parse.hpp"
#include <functional>

#include "pdm/errors.hpp"

#include <map>

namespace pdm {

namespace {

struct SlotTable {
    std::array<MultiIndex, DiffOp::kSlots> index{};
    int lookup[5][5][5];
    SlotTable() {
        int s = 0;
        for (int ord = 0; ord <= DiffOp::kMaxOrder; ++ord)
            for (int a = ord; a >= 0; --a)
                for (int b = ord - a; b >= 0; --b) {
                    const int c = ord - a - b;
                    index[static_cast<std::size_t>(s)] = {a, b, c};
                    lookup[a][b][c] = s++;
                }
    }
};

const SlotTable& slots() {
    static const SlotTable t;
    return t;
}

long binom(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

int DiffOp::slot(const MultiIndex& a) {
    if (a[0] < 0 || a[1] < 0 || a[2] < 0 || a[0] + a[1] + a[2] > kMaxOrder)
        throw OrderLimit("multi-index outside order " + std::to_string(kMaxOrder));
    return slots().lookup[a[0]][a[1]][a[2]];
}

const MultiIndex& DiffOp::index(int s) { return slots().index[static_cast<std::size_t>(s)]; }

DiffOp DiffOp::multiplication(const Expr& c) {
    DiffOp d;
    d.c_[0] = c;
    return d;
}

DiffOp DiffOp::partial(int a) {
    MultiIndex m{0, 0, 0};
    m[static_cast<std::size_t>(a - 1)] = 1;
    DiffOp d;
    d.set(m, Expr(1));
    return d;
}

int DiffOp::order() const {
    for (int s = kSlots - 1; s >= 0; --s)
        if (!c_[static_cast<std::size_t>(s)].is_zero()) return order_of(s);
    return -1;
}

bool DiffOp::is_zero() const {
    for (const auto& e : c_)
        if (!e.is_zero()) return false;
    return true;
}

DiffOp DiffOp::operator-() const {
    DiffOp d;
    for (int s = 0; s < kSlots; ++s) d.c_[static_cast<std::size_t>(s)] = -c_[static_cast<std::size_t>(s)];
    return d;
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
    for (int s = 0; s < kSlots; ++s) c_[static_cast<std::size_t>(s)] += o.c_[static_cast<std::size_t>(s)];
    return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
    for (int s = 0; s < kSlots; ++s) c_[static_cast<std::size_t>(s)] -= o.c_[static_cast<std::size_t>(s)];
    return *this;
}

DiffOp operator*(const Expr& c, const DiffOp& a) {
    DiffOp d;
    for (int s = 0; s < DiffOp::kSlots; ++s) d.c_[static_cast<std::size_t>(s)] = c * a.c_[static_cast<std::size_t>(s)];
    return d;
}

Expr DiffOp::apply(const Expr& psi) const {
    std::map<int, Expr> memo{{0, psi}};
    std::function<const Expr&(int)> deriv = [&](int s) -> const Expr& {
        if (auto it = memo.find(s); it != memo.end()) return it->second;
        MultiIndex m = index(s);
        int axis = m[0] ? 0 : (m[1] ? 1 : 2);
        --m[static_cast<std::size_t>(axis)];
        Expr d = differentiate(deriv(slot(m)), axis + 1);
        return memo.emplace(s, std::move(d)).first->second;
    };
    Expr out;
    for (int s = 0; s < kSlots; ++s) {
        const Expr& c = c_[static_cast<std::size_t>(s)];
        if (!c.is_zero()) out += c * deriv(s);
    }
    return out;
}

std::string DiffOp::str() const {
    std::string s;
    for (int k = 0; k < kSlots; ++k) {
        const Expr& c = c_[static_cast<std::size_t>(k)];
        if (c.is_zero()) continue;
        const auto& m = index(k);
        if (!s.empty()) s += "\n";
        s += "d[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," + std::to_string(m[2]) + "]: " + print(c);
    }
    return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------- composition

namespace {

/// Lazily computed derivatives d^gamma of one coefficient.
class DerivativeCache {
public:
    explicit DerivativeCache(const Expr& base) { memo_.emplace(0, base); }
    const Expr& get(int s) {
        if (auto it = memo_.find(s); it != memo_.end()) return it->second;
        MultiIndex m = DiffOp::index(s);
        const int axis = m[0] ? 0 : (m[1] ? 1 : 2);
        --m[static_cast<std::size_t>(axis)];
        Expr d = differentiate(get(DiffOp::slot(m)), axis + 1);
        return memo_.emplace(s, std::move(d)).first->second;
    }

private:
    std::map<int, Expr> memo_;
};

}  // namespace

DiffOp compose(const DiffOp& a, const DiffOp& b) {
    const int oa = a.order(), ob = b.order();
    if (oa < 0 || ob < 0) return {};
    if (oa + ob > DiffOp::kMaxOrder)
        throw OrderLimit("composition of orders " + std::to_string(oa) + " and " + std::to_string(ob) + " exceeds 4");
    std::array<std::optional<DerivativeCache>, DiffOp::kSlots> cache;
    std::array<Expr, DiffOp::kSlots> acc{};
    for (int sa = 0; sa < DiffOp::kSlots; ++sa) {
        const Expr& ca = a.coeff_at(sa);
        if (ca.is_zero()) continue;
        const MultiIndex& alpha = DiffOp::index(sa);
        for (int sb = 0; sb < DiffOp::kSlots; ++sb) {
            const Expr& cb = b.coeff_at(sb);
            if (cb.is_zero()) continue;
            if (!cache[static_cast<std::size_t>(sb)]) cache[static_cast<std::size_t>(sb)].emplace(cb);
            auto& dc = *cache[static_cast<std::size_t>(sb)];
            const MultiIndex& beta = DiffOp::index(sb);
            for (int g0 = 0; g0 <= alpha[0]; ++g0)
                for (int g1 = 0; g1 <= alpha[1]; ++g1)
                    for (int g2 = 0; g2 <= alpha[2]; ++g2) {
                        const Expr& db = dc.get(DiffOp::slot({g0, g1, g2}));
                        if (db.is_zero()) continue;
                        const long mult = binom(alpha[0], g0) * binom(alpha[1], g1) * binom(alpha[2], g2);
                        const MultiIndex out{alpha[0] - g0 + beta[0], alpha[1] - g1 + beta[1], alpha[2] - g2 + beta[2]};
                        Expr term = ca * db;
                        if (mult != 1) term = Expr(mult) * term;
                        acc[static_cast<std::size_t>(DiffOp::slot(out))] += term;
                    }
        }
    }
    DiffOp r;
    for (int s = 0; s < DiffOp::kSlots; ++s) r.add_to(s, acc[static_cast<std::size_t>(s)]);
    return r;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }
DiffOp anticommutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) + compose(b, a); }

// ---------------------------------------------------------------- generators

namespace {

DiffOp p_op(int a) { return Expr(Gauss(mpq_class(0), mpq_class(-1))) * DiffOp::partial(a); }

DiffOp dilatation() {
    DiffOp d = DiffOp::multiplication(Expr(Gauss(mpq_class(0), mpq_class(-3, 2))));
    for (int n = 1; n <= 3; ++n) d += Expr::x(n) * p_op(n);
    return d;
}

int eps(int a, int b, int c) {
    if (a == b || b == c || a == c) return 0;
    return ((a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1)) ? 1 : -1;
}

}  // namespace

DiffOp realize_generator(Gen g) {
    switch (g) {
        case Gen::P1: return p_op(1);
        case Gen::P2: return p_op(2);
        case Gen::P3: return p_op(3);
        case Gen::L1:
        case Gen::L2:
        case Gen::L3: {
            const int a = static_cast<int>(g) - static_cast<int>(Gen::L1) + 1;
            DiffOp l;
            for (int b = 1; b <= 3; ++b)
                for (int c = 1; c <= 3; ++c)
                    if (const int e = eps(a, b, c)) l += Expr(e) * Expr::x(b) * p_op(c);
            return l;
        }
        case Gen::D: return dilatation();
        case Gen::K1:
        case Gen::K2:
        case Gen::K3: {
            const int a = static_cast<int>(g) - static_cast<int>(Gen::K1) + 1;
            const Expr r2(Poly::r_squared());
            return compose(DiffOp::multiplication(r2), p_op(a)) - Expr(2) * Expr::x(a) * dilatation();
        }
    }
    throw Error("unknown generator");
}

DiffOp realize(const GenComb& g) {
    DiffOp d;
    for (const auto& [c, gen] : g.terms) d += c * realize_generator(gen);
    return d;
}

DiffOp hamiltonian(const Expr& f, const Expr& V) {
    SymMatrix mu{};
    for (int a = 0; a < 3; ++a) mu[a][a] = f;
    return from_second_order(mu, V);
}

DiffOp from_second_order(const SymMatrix& mu, const Expr& eta) {
    // -d_a mu^{ab} d_b = -mu^{ab} d_a d_b - (d_a mu^{ab}) d_b
    DiffOp q = DiffOp::multiplication(eta);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const Expr& m = mu[a][b];
            if (m.is_zero()) continue;
            MultiIndex ab{0, 0, 0};
            ++ab[static_cast<std::size_t>(a)];
            ++ab[static_cast<std::size_t>(b)];
            q.add_to(DiffOp::slot(ab), -m);
            MultiIndex bi{0, 0, 0};
            ++bi[static_cast<std::size_t>(b)];
            q.add_to(DiffOp::slot(bi), -differentiate(m, a + 1));
        }
    return q;
}

std::array<std::array<std::array<Expr, 3>, 3>, 3> third_order_tensor(const DiffOp& op) {
    std::array<std::array<std::array<Expr, 3>, 3>, 3> t{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                MultiIndex m{0, 0, 0};
                ++m[static_cast<std::size_t>(a)];
                ++m[static_cast<std::size_t>(b)];
                ++m[static_cast<std::size_t>(c)];
                long count = 6;  // number of ordered triples with this multiset
                for (int k : m) {
                    if (k == 2) count /= 2;
                    if (k == 3) count /= 6;
                }
                t[a][b][c] = op.coeff(m) * Expr::rational(1, count);
            }
    return t;
}

std::optional<std::pair<SymMatrix, Expr>> second_order_form(const DiffOp& op) {
    if (op.order() > 2) return std::nullopt;
    SymMatrix mu{};
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            MultiIndex m{0, 0, 0};
            ++m[static_cast<std::size_t>(a)];
            ++m[static_cast<std::size_t>(b)];
            mu[a][b] = a == b ? -op.coeff(m) : Expr::rational(-1, 2) * op.coeff(m);
            mu[b][a] = mu[a][b];
        }
    const DiffOp rest = op - from_second_order(mu, Expr());
    if (rest.order() > 0) return std::nullopt;
    return std::make_pair(mu, rest.coeff({0, 0, 0}));
}

DiffOp realize(const IntegralTerm& t, const Expr& f, const Expr& V) {
    DiffOp op;
    switch (t.kind) {
        case TermKind::Scalar:
            op = DiffOp::multiplication(t.value);
            break;
        case TermKind::FdotH: {
            SymMatrix mu{};
            const Expr Ff = t.value * f;
            for (int a = 0; a < 3; ++a) mu[a][a] = Ff;
            op = from_second_order(mu, t.value * V);
            break;
        }
        case TermKind::Bilinear: {
            const DiffOp A = realize(t.a);
            switch (t.form) {
                case BilinearForm::Square: op = compose(A, A); break;
                case BilinearForm::Product: op = compose(A, realize(t.b)); break;
                case BilinearForm::Anticommutator: op = anticommutator(A, realize(t.b)); break;
            }
            break;
        }
    }
    if (!(t.coeff == Expr(1))) op = t.coeff * op;
    return op;
}

DiffOp realize(const IntegralSpec& q, const Expr& f, const Expr& V) {
    DiffOp sum;
    for (const auto& t : q.terms) sum += realize(t, f, V);
    return sum;
}

}  // namespace pdm
