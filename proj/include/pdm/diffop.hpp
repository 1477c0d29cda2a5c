#pragma once

// Linear differential operators of order <= 4 in normal form
// sum_alpha c_alpha(x) d^alpha (all functions to the left of derivatives),
// together with the realizations of the conformal generators with p = -i d.

#include "pdm/expr.hpp"
#include "pdm/opterm.hpp"

#include <array>
#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace pdm {

using MultiIndex = std::array<int, 3>;

/// Symmetric 3x3 matrix of expressions (second-order coefficient tensors).
using SymMatrix = std::array<std::array<Expr, 3>, 3>;

class DiffOp {
public:
    static constexpr int kMaxOrder = 4;
    static constexpr int kSlots = 35;  // multi-indices with |alpha| <= 4

    DiffOp() = default;
    static DiffOp multiplication(const Expr& c);
    static DiffOp identity() { return multiplication(Expr(1)); }
    /// d/dx_a, a = 1..3.
    static DiffOp partial(int a);

    static int slot(const MultiIndex& alpha);
    static const MultiIndex& index(int slot);
    static int order_of(int slot) { const auto& m = index(slot); return m[0] + m[1] + m[2]; }

    const Expr& coeff(const MultiIndex& alpha) const { return c_[static_cast<std::size_t>(slot(alpha))]; }
    const Expr& coeff_at(int s) const { return c_[static_cast<std::size_t>(s)]; }
    void set(const MultiIndex& alpha, Expr e) { c_[static_cast<std::size_t>(slot(alpha))] = std::move(e); }
    void add_to(int s, const Expr& e) { c_[static_cast<std::size_t>(s)] += e; }

    /// Highest |alpha| with a nonzero coefficient; -1 for the zero operator.
    int order() const;
    bool is_zero() const;

    DiffOp operator-() const;
    DiffOp& operator+=(const DiffOp& o);
    DiffOp& operator-=(const DiffOp& o);
    friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
    friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
    /// Left multiplication by a function: (c A) psi = c * (A psi).
    friend DiffOp operator*(const Expr& c, const DiffOp& a);

    friend bool operator==(const DiffOp& a, const DiffOp& b) { return (a - b).is_zero(); }
    friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

    /// Applies the operator to a function.
    Expr apply(const Expr& psi) const;

    /// Normal-form listing "d[a,b,c]: coeff" of the nonzero coefficients.
    std::string str() const;

private:
    std::array<Expr, kSlots> c_{};
};

/// A o B in normal form (iterated Leibniz rule); OrderLimit if ord(A)+ord(B) > 4.
DiffOp compose(const DiffOp& a, const DiffOp& b);
DiffOp commutator(const DiffOp& a, const DiffOp& b);
DiffOp anticommutator(const DiffOp& a, const DiffOp& b);

/// P_a = -i d_a, L_a = eps_abc x_b p_c, D = x_n p_n - 3i/2, K_a = r^2 p_a - 2 x_a D.
DiffOp realize_generator(Gen g);
DiffOp realize(const GenComb& g);

/// One integral term as an operator; (F . H) is p F f p + F V for the given system.
DiffOp realize(const IntegralTerm& t, const Expr& f, const Expr& V);
/// Sum of the realized terms.
DiffOp realize(const IntegralSpec& q, const Expr& f, const Expr& V);

/// H = p_a f p_a + V = -d_a f d_a + V.
DiffOp hamiltonian(const Expr& f, const Expr& V);

/// Q = p_a mu^{ab} p_b + eta = -d_a mu^{ab} d_b + eta (see README: sign convention).
DiffOp from_second_order(const SymMatrix& mu, const Expr& eta);

/// Inverse of from_second_order: (mu, eta) with op == from_second_order(mu, eta),
/// or nullopt if op has order > 2 or is not of that (formally hermitian) shape.
std::optional<std::pair<SymMatrix, Expr>> second_order_form(const DiffOp& op);

/// Coefficient of d_a d_b d_c as a fully symmetric tensor (normal-form
/// coefficient divided by the multinomial count).
std::array<std::array<std::array<Expr, 3>, 3>, 3> third_order_tensor(const DiffOp& op);

}  // namespace pdm
