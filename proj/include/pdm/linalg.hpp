#pragma once

// Exact linear algebra over Q(i): reduced row echelon form, nullspaces and
// linear-span membership of differential operators.

#include "pdm/diffop.hpp"

#include <optional>
#include <vector>

namespace pdm {

using GaussVector = std::vector<Gauss>;

class GaussMatrix {
public:
    GaussMatrix() = default;
    GaussMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Gauss& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Gauss& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    void append_row(const GaussVector& row);

    /// In-place reduced row echelon form; returns the pivot columns.
    std::vector<std::size_t> rref();
    std::size_t rank() const;
    /// Basis of {v : A v = 0}, one vector per free column (free entry = 1).
    std::vector<GaussVector> nullspace() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Gauss> a_;
};

/// Exact solution of A x = b (some solution), or nullopt if inconsistent.
std::optional<GaussVector> solve(const GaussMatrix& a, const GaussVector& b);

/// Constants c_k with target == sum_k c_k basis_k, or nullopt. Candidates are
/// found from coefficient values at sample points and confirmed symbolically.
std::optional<GaussVector> span_coefficients(const DiffOp& target, const std::vector<DiffOp>& basis);

/// Linear combination sum_k c_k ops_k.
DiffOp combine(const std::vector<DiffOp>& ops, const GaussVector& c);

}  // namespace pdm
