#include "pdm/parse.hpp"

#include "pdm/errors.hpp"

#include <algorithm>
#include <cctype>

namespace pdm {

std::string gen_name(Gen g) {
    static const char* names[] = {"P1", "P2", "P3", "L1", "L2", "L3", "D", "K1", "K2", "K3"};
    return names[static_cast<int>(g)];
}

std::optional<Gen> gen_from_name(const std::string& name) {
    for (Gen g : kAllGens)
        if (gen_name(g) == name) return g;
    return std::nullopt;
}

namespace {

enum class Tok { Int, Ident, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t pos = 0;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Int, s.substr(i, j - i), i});
            i = j;
        } else if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
        } else if (c == 0xC2 && i + 1 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xB7) {
            out.push_back({Tok::Sym, ".", i});  // U+00B7 middle dot
            i += 2;
        } else if (std::string("+-*/^(){},.").find(static_cast<char>(c)) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), i});
            ++i;
        } else {
            throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool x_free(const Expr& e) {
    const auto sup = e.support();
    const auto& reg = Registry::instance();
    for (VarId v = 0; v < kMaxVars; ++v) {
        if (((sup >> v) & 1u) && reg.kind(v) != VarKind::Param) return false;
    }
    return true;
}

using Terms = std::vector<IntegralTerm>;

class Parser {
public:
    Parser(const std::string& text, const ParseContext& ctx, bool op_mode)
        : toks_(lex(text)), ctx_(ctx), op_mode_(op_mode) {}

    OpValue parse_all() {
        OpValue v = sum();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return v;
    }

private:
    const Token& peek() const { return toks_[k_]; }
    bool at_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    void expect(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        ++k_;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().pos); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const { throw SyntaxError(msg, pos); }

    OpValue sum() {
        OpValue v = product();
        while (at_sym("+") || at_sym("-")) {
            const bool minus = peek().text == "-";
            const std::size_t pos = peek().pos;
            ++k_;
            OpValue w = product();
            v = add(std::move(v), minus ? negate(std::move(w)) : std::move(w), pos);
        }
        return v;
    }

    OpValue product() {
        OpValue v = unary();
        while (at_sym("*") || at_sym("/")) {
            const bool divide = peek().text == "/";
            const std::size_t pos = peek().pos;
            ++k_;
            OpValue w = unary();
            if (divide) {
                auto* e = std::get_if<Expr>(&w);
                if (!e) fail_at("cannot divide by an operator", pos);
                if (e->is_zero()) throw DivisionByZero("division by zero at position " + std::to_string(pos));
                w = e->inverse();
            }
            v = mul(std::move(v), std::move(w), pos);
        }
        return v;
    }

    OpValue unary() {
        if (at_sym("-")) {
            ++k_;
            return negate(unary());
        }
        if (at_sym("+")) {
            ++k_;
            return unary();
        }
        return power();
    }

    OpValue power() {
        OpValue base = primary();
        if (!at_sym("^")) return base;
        const std::size_t pos = peek().pos;
        ++k_;
        bool paren = false;
        if (at_sym("(")) {
            paren = true;
            ++k_;
        }
        bool neg = false;
        if (at_sym("-")) {
            neg = true;
            ++k_;
        }
        if (peek().kind != Tok::Int) fail("expected integer exponent");
        const std::string digits = peek().text;
        ++k_;
        if (paren) expect(")");
        if (digits.size() > 4) fail_at("exponent too large", pos);
        int n = std::stoi(digits);
        if (neg) n = -n;
        if (auto* e = std::get_if<Expr>(&base)) {
            if (n < 0 && e->is_zero()) throw DivisionByZero("zero to a negative power");
            return e->pow(n);
        }
        if (auto* g = std::get_if<GenComb>(&base)) {
            if (n == 2) return Terms{IntegralTerm::bilinear(BilinearForm::Square, *g)};
            if (n == 1) return base;
        }
        fail_at("operators may only be squared", pos);
    }

    OpValue primary() {
        const Token t = peek();
        if (t.kind == Tok::Int) {
            ++k_;
            return Expr(Gauss(mpq_class(mpz_class(t.text))));
        }
        if (t.kind == Tok::Ident) {
            ++k_;
            return identifier(t);
        }
        if (at_sym("(")) {
            ++k_;
            OpValue v = sum();
            if (op_mode_ && at_sym(".")) {
                const std::size_t pos = peek().pos;
                ++k_;
                if (!(peek().kind == Tok::Ident && peek().text == "H")) fail("expected 'H' after '.'");
                ++k_;
                expect(")");
                auto* F = std::get_if<Expr>(&v);
                if (!F) fail_at("left operand of (F . H) must be a function", pos);
                return Terms{IntegralTerm::fdoth(*F)};
            }
            expect(")");
            return v;
        }
        if (op_mode_ && at_sym("{")) {
            const std::size_t pos = peek().pos;
            ++k_;
            OpValue a = sum();
            expect(",");
            OpValue b = sum();
            expect("}");
            auto* ga = std::get_if<GenComb>(&a);
            auto* gb = std::get_if<GenComb>(&b);
            if (!ga || !gb) fail_at("anticommutator operands must be first-order generators", pos);
            return Terms{IntegralTerm::bilinear(BilinearForm::Anticommutator, *ga, *gb)};
        }
        if (t.kind == Tok::End) fail("unexpected end of input");
        fail("unexpected '" + t.text + "'");
    }

    OpValue identifier(const Token& t) {
        const std::string& n = t.text;
        if (n == "i") return Expr::i();
        static const std::map<std::string, VarId> builtins = {
            {"x1", var::x1}, {"x2", var::x2},   {"x3", var::x3},       {"r", var::r},
            {"rt", var::rt}, {"phi", var::phi}, {"theta", var::theta}, {"lrt", var::lrt}};
        if (auto it = builtins.find(n); it != builtins.end()) return Expr::var(it->second);
        if (auto it = ctx_.definitions.find(n); it != ctx_.definitions.end()) return it->second;
        if (auto it = ctx_.generators.find(n); it != ctx_.generators.end()) return Expr::var(it->second);
        if (ctx_.params.count(n)) return Expr::param(n);
        if (op_mode_) {
            if (auto g = gen_from_name(n)) return GenComb::single(*g);
        }
        throw UnknownSymbol("unknown identifier '" + n + "' at position " + std::to_string(t.pos));
    }

    static OpValue negate(OpValue v) { return scale(std::move(v), Expr(-1)); }

    static OpValue scale(OpValue v, const Expr& c) {
        if (auto* e = std::get_if<Expr>(&v)) return *e * c;
        if (auto* g = std::get_if<GenComb>(&v)) {
            for (auto& [k, gen] : g->terms) k *= c;
            return v;
        }
        for (auto& t : std::get<Terms>(v)) t.coeff *= c;
        return v;
    }

    OpValue add(OpValue a, OpValue b, std::size_t pos) const {
        if (a.index() == 0 && b.index() == 0) return std::get<Expr>(a) + std::get<Expr>(b);
        if (a.index() == 1 && b.index() == 1) {
            auto& x = std::get<GenComb>(a);
            for (auto& [c, g] : std::get<GenComb>(b).terms) {
                auto it = std::find_if(x.terms.begin(), x.terms.end(), [&](const auto& p) { return p.second == g; });
                if (it == x.terms.end()) {
                    x.terms.emplace_back(c, g);
                } else {
                    it->first += c;
                }
            }
            std::erase_if(x.terms, [](const auto& p) { return p.first.is_zero(); });
            return a;
        }
        if (a.index() == 1 || b.index() == 1) fail_at("cannot add a first-order generator to other terms", pos);
        Terms out;
        for (OpValue* v : {&a, &b}) {
            if (auto* e = std::get_if<Expr>(v)) {
                out.push_back(IntegralTerm::scalar(*e));
            } else {
                for (auto& t : std::get<Terms>(*v)) out.push_back(std::move(t));
            }
        }
        return out;
    }

    OpValue mul(OpValue a, OpValue b, std::size_t pos) const {
        if (a.index() == 0 && b.index() == 0) return std::get<Expr>(a) * std::get<Expr>(b);
        if (a.index() == 1 && b.index() == 1)
            return Terms{IntegralTerm::bilinear(BilinearForm::Product, std::get<GenComb>(a), std::get<GenComb>(b))};
        if (a.index() == 0 || b.index() == 0) {
            const Expr& c = a.index() == 0 ? std::get<Expr>(a) : std::get<Expr>(b);
            if (!x_free(c)) fail_at("operator coefficients must not depend on coordinates; use (F . H)", pos);
            return scale(a.index() == 0 ? std::move(b) : std::move(a), c);
        }
        fail_at("product exceeds second order", pos);
    }

    std::vector<Token> toks_;
    std::size_t k_ = 0;
    const ParseContext& ctx_;
    bool op_mode_;
};

}  // namespace

Expr parse_expr(const std::string& text, const ParseContext& ctx) {
    Parser p(text, ctx, false);
    return std::get<Expr>(p.parse_all());
}

Expr parse_expr(const std::string& text, std::initializer_list<const char*> params) {
    ParseContext ctx;
    for (const char* n : params) ctx.params.insert(n);
    return parse_expr(text, ctx);
}

OpValue parse_operator(const std::string& text, const ParseContext& ctx) {
    Parser p(text, ctx, true);
    return p.parse_all();
}

IntegralSpec parse_integral(const std::string& text, const ParseContext& ctx) {
    OpValue v = parse_operator(text, ctx);
    IntegralSpec spec;
    if (auto* e = std::get_if<Expr>(&v)) {
        spec.terms.push_back(IntegralTerm::scalar(*e));
    } else if (auto* t = std::get_if<std::vector<IntegralTerm>>(&v)) {
        spec.terms = std::move(*t);
    } else {
        throw SyntaxError("expected a second-order integral, got a first-order generator", 0);
    }
    return spec;
}

GenComb parse_gencomb(const std::string& text, const ParseContext& ctx) {
    OpValue v = parse_operator(text, ctx);
    if (auto* g = std::get_if<GenComb>(&v)) return *g;
    throw SyntaxError("expected a first-order generator combination", 0);
}

// ---------------------------------------------------------------- printing

namespace {

std::optional<std::uint32_t> find_factor(const Expr& e, const Poly& p) {
    for (const auto& f : e.den())
        if (factor_poly(f.id) == p) return f.id;
    return std::nullopt;
}

bool all_terms_have(const Poly& p, VarId v) {
    for (const auto& t : p.terms())
        if (t.m.exp(v) != 1) return false;
    return !p.is_zero();
}

Poly strip_var(const Poly& p, VarId v) { return p.divided_by(Monomial::var(v)); }

}  // namespace

std::string print(const Expr& e) {
    if (e.den().empty()) return e.num().str();
    Poly num = e.num();
    struct Piece {
        std::string base;
        int exp;
        const Poly* poly;
    };
    std::vector<Piece> pieces;
    std::optional<std::uint32_t> radical_id[2] = {find_factor(e, Poly::r_squared()), find_factor(e, Poly::rt_squared())};
    const VarId radical_var[2] = {var::r, var::rt};
    bool stripped[2] = {false, false};
    for (int k = 0; k < 2; ++k) {
        if (radical_id[k] && all_terms_have(num, radical_var[k])) {
            num = strip_var(num, radical_var[k]);
            stripped[k] = true;
        }
    }
    for (const auto& f : e.den()) {
        const Poly& p = factor_poly(f.id);
        int k = radical_id[0] == f.id ? 0 : (radical_id[1] == f.id ? 1 : -1);
        if (k >= 0) {
            const int ex = 2 * f.exp - (stripped[k] ? 1 : 0);
            pieces.push_back({Registry::instance().name(radical_var[k]), ex, &p});
        } else {
            pieces.push_back({p.size() == 1 ? p.str() : "(" + p.str() + ")", f.exp, &p});
        }
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& a, const Piece& b) { return Poly::compare(*a.poly, *b.poly) > 0; });
    std::string den;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k) den += "*";
        den += pieces[k].base;
        if (pieces[k].exp > 1) den += "^" + std::to_string(pieces[k].exp);
    }
    if (pieces.size() > 1) den = "(" + den + ")";
    std::string n = num.str();
    if (num.size() > 1) n = "(" + n + ")";
    return n + "/" + den;
}

namespace {

std::string coeff_prefix(const Expr& c, bool& negative) {
    negative = false;
    if (c == Expr(1)) return "";
    if (c == Expr(-1)) {
        negative = true;
        return "";
    }
    std::string s = print(c);
    if (!s.empty() && s[0] == '-' && c.num().size() == 1) {
        negative = true;
        s = print(-c);
    }
    if (c.num().size() > 1 && c.den().empty()) s = "(" + s + ")";
    return s + "*";
}

std::string operand(const GenComb& g) {
    std::string s = print(g);
    return g.terms.size() == 1 && g.is_single() ? s : "(" + s + ")";
}

}  // namespace

std::string print(const GenComb& g) {
    if (g.terms.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < g.terms.size(); ++k) {
        bool neg = false;
        const std::string pre = coeff_prefix(g.terms[k].first, neg);
        const std::string body = pre + gen_name(g.terms[k].second);
        if (k == 0) {
            s = neg ? "-" + body : body;
        } else {
            s += neg ? " - " + body : " + " + body;
        }
    }
    return s;
}

std::string print(const IntegralTerm& t, bool leading) {
    std::string body;
    switch (t.kind) {
        case TermKind::Bilinear:
            if (t.form == BilinearForm::Anticommutator) {
                body = "{" + operand(t.a) + ", " + operand(t.b) + "}";
            } else if (t.form == BilinearForm::Square) {
                body = operand(t.a) + "^2";
            } else {
                body = operand(t.a) + "*" + operand(t.b);
            }
            break;
        case TermKind::FdotH:
            body = "(" + print(t.value) + " . H)";
            break;
        case TermKind::Scalar: {
            body = print(t.value);
            if (t.value.num().size() > 1 && t.value.den().empty()) body = "(" + body + ")";
            break;
        }
    }
    bool neg = false;
    std::string pre = coeff_prefix(t.coeff, neg);
    if (t.kind == TermKind::Scalar && pre.empty() && !body.empty() && body[0] == '-' && t.value.num().size() == 1) {
        neg = !neg;
        body = print(-t.value);
    }
    const std::string s = pre + body;
    if (leading) return neg ? "-" + s : s;
    return neg ? " - " + s : " + " + s;
}

std::string print(const IntegralSpec& s) {
    if (s.terms.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < s.terms.size(); ++k) out += print(s.terms[k], k == 0);
    return out;
}

}  // namespace pdm
