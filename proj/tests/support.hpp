#pragma once

// Shared helpers for the unit tests: seeded random expressions and points.

#include "pdm/expr.hpp"
#include "pdm/parse.hpp"

#include <random>

namespace pdm::testing {

/// Random expression tree over coordinates, radicals, angles and small
/// integers; divisions by an identically zero expression are skipped.
inline Expr random_expr(std::mt19937_64& rng, int depth, bool allow_generators = true) {
    std::uniform_int_distribution<int> pick(0, 9);
    if (depth == 0 || pick(rng) < 3) {
        const int n = allow_generators ? 9 : 4;
        switch (std::uniform_int_distribution<int>(0, n - 1)(rng)) {
            case 0: return Expr::x(1);
            case 1: return Expr::x(2);
            case 2: return Expr::x(3);
            case 3: return Expr(std::uniform_int_distribution<long>(-3, 3)(rng));
            case 4: return Expr::r();
            case 5: return Expr::rt();
            case 6: return Expr::phi();
            case 7: return Expr::theta();
            default: return Expr::lrt();
        }
    }
    Expr a = random_expr(rng, depth - 1, allow_generators);
    Expr b = random_expr(rng, depth - 1, allow_generators);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return a + b;
        case 1: return a - b;
        case 2: return a * b;
        default: return b.is_zero() ? a : a / b;
    }
}

/// Points with rational r and rt (scaled Pythagorean quadruples).
inline const std::vector<std::array<long, 3>>& pythagorean_points() {
    static const std::vector<std::array<long, 3>> pts = {
        {3, 4, 12}, {6, 8, 24}, {9, 12, 20}, {12, 16, 15}, {7, 24, 60},
        {-3, 4, 12}, {3, -4, -12}, {8, 6, 24}, {5, 12, 84}, {12, 16, 21}};
    return pts;
}

inline Bindings point_bindings(const std::array<long, 3>& p) {
    return {{var::x1, Expr(p[0])}, {var::x2, Expr(p[1])}, {var::x3, Expr(p[2])}};
}

}  // namespace pdm::testing
