#include "pdm/linalg.hpp"

#include "pdm/errors.hpp"
#include "pdm/oracle.hpp"

namespace pdm {

void GaussMatrix::append_row(const GaussVector& row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw InvalidParams("row length mismatch");
    a_.insert(a_.end(), row.begin(), row.end());
    ++rows_;
}

std::vector<std::size_t> GaussMatrix::rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
        std::size_t p = r;
        while (p < rows_ && (*this)(p, c).is_zero()) ++p;
        if (p == rows_) continue;
        if (p != r)
            for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(p, j), (*this)(r, j));
        const Gauss inv = (*this)(r, c).inverse();
        for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) *= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r || (*this)(i, c).is_zero()) continue;
            const Gauss m = (*this)(i, c);
            for (std::size_t j = c; j < cols_; ++j)
                if (!(*this)(r, j).is_zero()) (*this)(i, j) -= m * (*this)(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

std::size_t GaussMatrix::rank() const {
    GaussMatrix m = *this;
    return m.rref().size();
}

std::vector<GaussVector> GaussMatrix::nullspace() const {
    GaussMatrix m = *this;
    const auto pivots = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<GaussVector> out;
    for (std::size_t free = 0; free < cols_; ++free) {
        if (is_pivot[free]) continue;
        GaussVector v(cols_, Gauss(0));
        v[free] = Gauss(1);
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -m(k, free);
        out.push_back(std::move(v));
    }
    return out;
}

std::optional<GaussVector> solve(const GaussMatrix& a, const GaussVector& b) {
    if (b.size() != a.rows()) throw InvalidParams("right-hand side length mismatch");
    GaussMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    const auto pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    GaussVector x(a.cols(), Gauss(0));
    for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = aug(k, a.cols());
    return x;
}

DiffOp combine(const std::vector<DiffOp>& ops, const GaussVector& c) {
    DiffOp out;
    for (std::size_t k = 0; k < ops.size(); ++k)
        if (!c[k].is_zero()) out += Expr(c[k]) * ops[k];
    return out;
}

std::optional<GaussVector> span_coefficients(const DiffOp& target, const std::vector<DiffOp>& basis) {
    // Rows: (point, slot) pairs; more points are added while the numeric
    // solution fails symbolic confirmation (it can only do so by accident).
    const auto points = sample_points(16, 0x5eed);
    GaussMatrix a;
    GaussVector rhs;
    std::size_t used = 0;
    auto add_point = [&](const PointSample& p) {
        try {
            std::vector<GaussVector> rows;
            GaussVector b;
            for (int s = 0; s < DiffOp::kSlots; ++s) {
                GaussVector row;
                row.reserve(basis.size());
                bool any = !target.coeff_at(s).is_zero();
                for (const auto& op : basis) {
                    row.push_back(op.coeff_at(s).is_zero() ? Gauss(0) : value_at(op.coeff_at(s), p));
                    any = any || !op.coeff_at(s).is_zero();
                }
                if (!any) continue;
                rows.push_back(std::move(row));
                b.push_back(target.coeff_at(s).is_zero() ? Gauss(0) : value_at(target.coeff_at(s), p));
            }
            for (std::size_t k = 0; k < rows.size(); ++k) {
                if (basis.empty()) {
                    if (!b[k].is_zero()) return false;
                    continue;
                }
                a.append_row(rows[k]);
                rhs.push_back(b[k]);
            }
            return true;
        } catch (const PoleAtPoint&) {
            return true;
        } catch (const DivisionByZero&) {
            return true;
        }
    };
    for (const auto& p : points) {
        if (!add_point(p)) return std::nullopt;
        ++used;
        if (used < 4) continue;
        if (basis.empty()) return target.is_zero() ? std::optional<GaussVector>(GaussVector{}) : std::nullopt;
        if (a.rows() == 0) continue;
        auto x = solve(a, rhs);
        if (!x) return std::nullopt;
        if (combine(basis, *x) == target) return x;
    }
    return std::nullopt;
}

}  // namespace pdm
