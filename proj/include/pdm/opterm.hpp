#pragma once

// Structured integrals of motion: bilinear combinations of the conformal
// generators, (F.H) terms and scalar terms, as written in the tables.

#include "pdm/expr.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pdm {

enum class Gen { P1, P2, P3, L1, L2, L3, D, K1, K2, K3 };

inline constexpr std::array<Gen, 10> kAllGens = {Gen::P1, Gen::P2, Gen::P3, Gen::L1, Gen::L2,
                                                 Gen::L3, Gen::D,  Gen::K1, Gen::K2, Gen::K3};

std::string gen_name(Gen g);
std::optional<Gen> gen_from_name(const std::string& name);

/// Linear combination sum_k c_k * G_k with constant (parameter-only) coefficients.
struct GenComb {
    std::vector<std::pair<Expr, Gen>> terms;
    static GenComb single(Gen g) { return GenComb{{{Expr(1), g}}}; }
    bool is_single() const { return terms.size() == 1 && terms[0].first == Expr(1); }
};

enum class BilinearForm { Anticommutator, Product, Square };

enum class TermKind { Bilinear, FdotH, Scalar };

struct IntegralTerm {
    TermKind kind = TermKind::Scalar;
    Expr coeff{1};              // constant multiplier (target of correction search)
    BilinearForm form = BilinearForm::Product;
    GenComb a, b;               // Bilinear operands (b unused for Square)
    Expr value;                 // F for FdotH, the scalar for Scalar

    static IntegralTerm bilinear(BilinearForm f, GenComb a, GenComb b = {}) {
        IntegralTerm t;
        t.kind = TermKind::Bilinear;
        t.form = f;
        t.a = std::move(a);
        t.b = std::move(b);
        return t;
    }
    static IntegralTerm fdoth(Expr F) {
        IntegralTerm t;
        t.kind = TermKind::FdotH;
        t.value = std::move(F);
        return t;
    }
    static IntegralTerm scalar(Expr s) {
        IntegralTerm t;
        t.kind = TermKind::Scalar;
        t.value = std::move(s);
        return t;
    }
};

struct IntegralSpec {
    std::string label;
    std::vector<IntegralTerm> terms;
};

}  // namespace pdm
