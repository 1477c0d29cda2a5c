#pragma once

// Recursive-descent parser and printer for the expression grammar
//
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' int | '^' '(' ['-'] int ')')?
//   primary := integer | identifier | '(' sum ')'
//
// extended in operator mode by generator names P1..K3, D, anticommutators
// '{' A ',' B '}' and the (F . H) notation.

#include "pdm/expr.hpp"
#include "pdm/opterm.hpp"

#include <map>
#include <set>
#include <string>
#include <variant>

namespace pdm {

struct ParseContext {
    std::set<std::string> params;              // declared parameter names
    std::map<std::string, Expr> definitions;   // named sub-expressions (F, G, ...)
    std::map<std::string, VarId> generators;   // visible user generators
};

/// Parses a scalar expression. Unknown identifiers raise UnknownSymbol.
Expr parse_expr(const std::string& text, const ParseContext& ctx = {});
/// Convenience: declares the listed names as parameters.
Expr parse_expr(const std::string& text, std::initializer_list<const char*> params);

/// Value of an operator-mode parse: a scalar, a generator combination, or
/// a list of second-order integral terms.
using OpValue = std::variant<Expr, GenComb, std::vector<IntegralTerm>>;
OpValue parse_operator(const std::string& text, const ParseContext& ctx = {});
/// Parses a second-order integral (scalars become Scalar terms).
IntegralSpec parse_integral(const std::string& text, const ParseContext& ctx = {});
/// Parses a first-order generator combination such as "K3 - P3".
GenComb parse_gencomb(const std::string& text, const ParseContext& ctx = {});

/// Grammar-conforming rendering; parse_expr(print(e)) == e.
std::string print(const Expr& e);
std::string print(const GenComb& g);
std::string print(const IntegralTerm& t, bool leading);
std::string print(const IntegralSpec& s);

}  // namespace pdm
