#include "pdm/catalog.hpp"

#include "pdm/determining.hpp"
#include "pdm/errors.hpp"
#include "pdm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <regex>
#include <functional>
#include <sstream>

#ifndef PDM_CATALOG_DIR
#define PDM_CATALOG_DIR "catalog"
#endif

namespace pdm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splits at `sep` outside parentheses and braces.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '{') ++depth;
        if (c == ')' || c == '}') --depth;
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& line, std::size_t offset) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SyntaxError("expected 'key = value'", offset);
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) out += (k ? sep : "") + v[k];
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string truncated(std::string s, std::size_t n = 240) {
    if (s.size() > n) s = s.substr(0, n) + " ...";
    return s;
}

}  // namespace

// ---------------------------------------------------------------- text format

CatalogEntry parse_entry(const std::string& text) {
    CatalogEntry e;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::string integral_label;
    std::size_t offset = 0;
    bool header_comment = true;
    auto flush_integral = [&](const std::string& body) {
        if (!integral_label.empty()) {
            for (auto& it : e.integrals)
                if (it.name == integral_label) {
                    it.text = trim(it.text.empty() ? body : it.text + " " + body);
                    return;
                }
        }
    };
    while (std::getline(in, raw)) {
        const std::size_t line_offset = offset;
        offset += raw.size() + 1;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header_comment) e.comment += (e.comment.empty() ? "" : "\n") + trim(line.substr(1));
            continue;
        }
        header_comment = false;
        if (line.front() == '[') {
            if (line.back() != ']') throw SyntaxError("unterminated section header", line_offset);
            const std::string inner = trim(line.substr(1, line.size() - 2));
            integral_label.clear();
            if (inner.rfind("integral", 0) == 0) {
                section = "integral";
                integral_label = trim(inner.substr(8));
                if (integral_label.empty()) integral_label = "Q";
                e.integrals.push_back({integral_label, ""});
            } else if (inner == "system" || inner == "functions" || inner == "generators" || inner == "basis" ||
                       inner == "dictionary") {
                section = inner == "dictionary" ? "basis" : inner;
                if (section == "basis" && !e.basis) e.basis = AnsatzBasisText{};
            } else {
                throw SyntaxError("unknown section '" + inner + "'", line_offset);
            }
            continue;
        }
        if (section == "integral") {
            flush_integral(line);
            continue;
        }
        auto [key, value] = split_assignment(line, line_offset);
        if (section == "system") {
            if (key == "id") e.id = value;
            else if (key == "params") e.params = split_top(value, ',');
            else if (key == "symbolic") e.symbolic = split_top(value, ',');
            else if (key == "f") e.f = value;
            else if (key == "V") e.V = value;
            else if (key == "family") e.family = value;
            else if (key == "lie") e.lie = split_top(value, ';');
            else if (key == "define") {
                auto [n, t] = split_assignment(value, line_offset);
                e.defines.push_back({n, t});
            } else if (key == "choices") {
                const auto colon = value.find(':');
                if (colon == std::string::npos) throw SyntaxError("expected 'name: values'", line_offset);
                ChoiceSlot c{trim(value.substr(0, colon)), {}};
                for (const auto& v : split_top(value.substr(colon + 1), ',')) c.values.push_back(std::stol(v));
                e.choices.push_back(c);
            } else {
                throw SyntaxError("unknown key '" + key + "'", line_offset);
            }
        } else if (section == "functions") {
            static const std::regex head(R"(^([A-Za-z][A-Za-z0-9_]*)\s*\(\s*([A-Za-z][A-Za-z0-9_]*)\s*\)$)");
            std::smatch m;
            if (!std::regex_match(key, m, head)) throw SyntaxError("expected 'F(arg) = ...'", line_offset);
            FunctionSlot f{m[1], m[2], {}};
            for (const auto& inst : split_top(value, '|')) f.instances.push_back(inst);
            e.functions.push_back(f);
        } else if (section == "generators") {
            e.generators.push_back({key, value});
        } else if (section == "basis") {
            if (key == "families") {
                for (const auto& v : split_top(value, ',')) e.basis->families.push_back(std::stoi(v));
            } else if (key == "eta") {
                e.basis->eta = split_top(value, ',');
            } else if (key == "g") {
                e.basis->g = split_top(value, ',');
            } else {
                throw SyntaxError("unknown basis key '" + key + "'", line_offset);
            }
        } else {
            throw SyntaxError("content outside a section", line_offset);
        }
    }
    if (e.id.empty()) throw SyntaxError("missing system id", 0);
    if (e.f.empty() || e.V.empty()) throw SyntaxError("system needs f and V", 0);
    return e;
}

std::string serialize(const CatalogEntry& e) {
    std::ostringstream out;
    if (!e.comment.empty()) {
        std::istringstream c(e.comment);
        std::string line;
        while (std::getline(c, line)) out << "# " << line << "\n";
    }
    out << "[system]\nid = " << e.id << "\n";
    if (!e.params.empty()) out << "params = " << join(e.params, ", ") << "\n";
    if (!e.symbolic.empty()) out << "symbolic = " << join(e.symbolic, ", ") << "\n";
    for (const auto& c : e.choices) {
        std::vector<std::string> v;
        for (long x : c.values) v.push_back(std::to_string(x));
        out << "choices = " << c.name << ": " << join(v, ", ") << "\n";
    }
    for (const auto& d : e.defines) out << "define = " << d.name << " = " << d.text << "\n";
    out << "f = " << e.f << "\nV = " << e.V << "\n";
    if (!e.family.empty()) out << "family = " << e.family << "\n";
    if (!e.lie.empty()) out << "lie = " << join(e.lie, "; ") << "\n";
    if (!e.functions.empty()) {
        out << "\n[functions]\n";
        for (const auto& f : e.functions) out << f.name << "(" << f.argument << ") = " << join(f.instances, " | ") << "\n";
    }
    if (!e.generators.empty()) {
        out << "\n[generators]\n";
        for (const auto& g : e.generators) out << g.name << " = " << g.text << "\n";
    }
    for (const auto& q : e.integrals) out << "\n[integral " << q.name << "]\n" << q.text << "\n";
    if (e.basis) {
        std::vector<std::string> fam;
        for (int m : e.basis->families) fam.push_back(std::to_string(m));
        out << "\n[basis]\nfamilies = " << join(fam, ", ") << "\n";
        if (!e.basis->eta.empty()) out << "eta = " << join(e.basis->eta, ", ") << "\n";
        if (!e.basis->g.empty()) out << "g = " << join(e.basis->g, ", ") << "\n";
    }
    return out.str();
}

bool id_less(const std::string& a, const std::string& b) {
    auto key = [](const std::string& s) {
        static const std::regex re(R"(^T(\d+)\.(\d+)(.*)$)");
        std::smatch m;
        if (std::regex_match(s, m, re)) return std::make_tuple(std::stoi(m[1]), std::stoi(m[2]), std::string(m[3]));
        return std::make_tuple(1 << 20, 0, s);
    };
    return key(a) < key(b);
}

std::vector<CatalogEntry> load_catalog(const std::string& dir) {
    std::vector<CatalogEntry> out;
    for (const auto& file : std::filesystem::directory_iterator(dir)) {
        if (file.path().extension() != ".sys") continue;
        std::ifstream in(file.path());
        std::stringstream buf;
        buf << in.rdbuf();
        out.push_back(parse_entry(buf.str()));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return id_less(a.id, b.id); });
    return out;
}

const std::vector<CatalogEntry>& builtin_catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        const char* env = std::getenv("PDM_CATALOG_DIR");
        return load_catalog(env ? env : PDM_CATALOG_DIR);
    }();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& id) {
    for (const auto& e : builtin_catalog())
        if (e.id == id) return e;
    throw UnknownSymbol("no catalog entry '" + id + "'");
}

// ---------------------------------------------------------------- generators

VarId define_generator(const std::string& name, const std::string& text, const ParseContext& ctx) {
    static const std::regex power(R"(^\s*rt\s*\^\s*\(\s*(-?\d+)\s*/\s*(\d+)\s*\)\s*$)");
    std::smatch m;
    ExpGenerator g{name, {}, {}};
    if (std::regex_match(text, m, power)) {
        const long p = std::stol(m[1]);
        const long q = std::stol(m[2]);
        g.exponent.push_back({Expr::rational(p, q), var::lrt});
        g.relation = name + "^" + std::to_string(q) + " = rt^" + std::to_string(p);
        return register_exp_generator(g);
    }
    const std::string t = trim(text);
    if (t.rfind("exp(", 0) != 0 || t.back() != ')')
        throw UnsupportedExpression("generator '" + name + "' must be exp(...) or rt^(p/q)");
    const Expr inner = parse_expr(t.substr(4, t.size() - 5), ctx);
    Bindings zero{{var::lrt, Expr(0)}, {var::phi, Expr(0)}, {var::theta, Expr(0)}};
    const Expr c0 = substitute(inner, zero);
    if (!c0.is_zero()) throw UnsupportedExpression("generator '" + name + "' exponent has a constant term");
    Expr rebuilt(0);
    for (VarId base : {var::lrt, var::phi, var::theta}) {
        Bindings unit = zero;
        unit[base] = Expr(1);
        const Expr c = substitute(inner, unit);
        if (c.is_zero()) continue;
        for (VarId v = 0; v < var::kBuiltins; ++v)
            if (c.uses(v)) throw UnsupportedExpression("generator '" + name + "' exponent is not linear in lrt, phi, theta");
        g.exponent.push_back({c, base});
        rebuilt += c * Expr::var(base);
    }
    if (rebuilt != inner) throw UnsupportedExpression("generator '" + name + "' exponent is not linear in lrt, phi, theta");
    return register_exp_generator(g);
}

// ---------------------------------------------------------------- instantiation

std::string Binding::str() const {
    std::vector<std::string> parts;
    for (const auto& [k, v] : values) parts.push_back(k + "=" + v.str());
    for (const auto& [k, v] : choices) parts.push_back(k + "=" + std::to_string(v));
    parts.push_back("functions=" + std::to_string(function_instance));
    return join(parts, ", ");
}

nlohmann::json Binding::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, v] : values) params[k] = v.str();
    j["params"] = params;
    nlohmann::json ch = nlohmann::json::object();
    for (const auto& [k, v] : choices) ch[k] = v;
    j["choices"] = ch;
    j["function_instance"] = function_instance;
    return j;
}

SystemInstance instantiate(const CatalogEntry& e, const Binding& b) {
    SystemInstance s;
    s.id = e.id;
    s.binding = b;
    ParseContext& ctx = s.ctx;
    for (const auto& p : e.params) {
        auto it = b.values.find(p);
        if (it == b.values.end()) throw UnknownSymbol("missing binding for parameter '" + p + "'");
        ctx.definitions[p] = Expr(it->second);
    }
    static const double kIrrational[] = {1.4142135623730951, 1.7320508075688772, 2.2360679774997896};
    int k = 0;
    for (const auto& p : e.symbolic) {
        ctx.params.insert(p);
        s.float_values[p] = kIrrational[k++ % 3];
    }
    for (const auto& c : e.choices) {
        auto it = b.choices.find(c.name);
        if (it == b.choices.end()) throw UnknownSymbol("missing choice '" + c.name + "'");
        ctx.definitions[c.name] = Expr(it->second);
    }
    for (const auto& d : e.defines) ctx.definitions[d.name] = parse_expr(d.text, ctx);
    for (const auto& g : e.generators) ctx.generators[g.name] = define_generator(g.name, g.text, ctx);
    for (const auto& f : e.functions) {
        if (f.instances.empty()) throw InvalidParams("function '" + f.name + "' has no instances");
        const auto idx = static_cast<std::size_t>(b.function_instance) % f.instances.size();
        ctx.definitions[f.name] = parse_expr(f.instances[idx], ctx);
    }
    s.f = parse_expr(e.f, ctx);
    s.V = parse_expr(e.V, ctx);
    if (s.f.is_zero()) throw DivisionByZero("inverse mass vanishes identically");
    for (const auto& q : e.integrals) {
        IntegralSpec spec = parse_integral(q.text, ctx);
        spec.label = q.name;
        s.integrals.push_back(std::move(spec));
    }
    for (const auto& l : e.lie) {
        s.lie.push_back(parse_gencomb(l, ctx));
        s.lie_text.push_back(l);
    }
    return s;
}

std::vector<Binding> binding_skeletons(const CatalogEntry& e) {
    std::vector<Binding> out{Binding{}};
    for (const auto& c : e.choices) {
        std::vector<Binding> next;
        for (const auto& b : out)
            for (long v : c.values) {
                Binding nb = b;
                nb.choices[c.name] = v;
                next.push_back(nb);
            }
        out = std::move(next);
    }
    int instances = 1;
    for (const auto& f : e.functions) instances = std::max(instances, static_cast<int>(f.instances.size()));
    std::vector<Binding> full;
    for (const auto& b : out)
        for (int i = 0; i < instances; ++i) {
            Binding nb = b;
            nb.function_instance = i;
            full.push_back(nb);
        }
    return full;
}

Binding random_binding(const CatalogEntry& e, Binding skeleton, std::mt19937_64& rng) {
    static const long kOdd[] = {1, 3, 5, 7, 9, 11, 13, -1, -3, -5, -7};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kOdd) - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Binding b = skeleton;
        // Distinct values per parameter avoid accidental coincidences such as
        // a cancelling numerator; the binding is redrawn on degeneracy.
        std::vector<long> used;
        for (const auto& p : e.params) {
            long v = 0;
            do v = kOdd[pick(rng)];
            while (std::find(used.begin(), used.end(), v) != used.end() && used.size() < std::size(kOdd));
            used.push_back(v);
            b.values[p] = Gauss(v);
        }
        try {
            const SystemInstance s = instantiate(e, b);
            if (!s.V.is_zero() || e.V == "0") return b;
        } catch (const DivisionByZero&) {
        }
    }
    throw InvalidParams("no admissible binding found for " + e.id);
}

IntegralSpec rescaled(const IntegralSpec& q, const std::vector<mpq_class>& multipliers) {
    IntegralSpec out = q;
    for (std::size_t k = 0; k < out.terms.size() && k < multipliers.size(); ++k)
        if (multipliers[k] != 1) out.terms[k].coeff = out.terms[k].coeff * Expr(Gauss(multipliers[k]));
    return out;
}

// ---------------------------------------------------------------- checks

nlohmann::json IntegralDiagnostics::to_json() const {
    return {{"second_order_form", second_order_form}, {"m0", m0_zero},
            {"m1", m1_zero}, {"m2_printed", m2_printed_zero},
            {"anomaly_zero", anomaly_zero}, {"scalar_completion_exists", completion_curl_free}};
}

nlohmann::json IntegralCheck::to_json() const {
    nlohmann::json j = {{"label", label},
                        {"path", float_checked ? "exact+oracle+float" : "exact+oracle"},
                        {"exact_zero", exact_zero},
                        {"oracle_zero", oracle_zero},
                        {"commutator_order", commutator_order},
                        {"residuals", residual}};
    if (float_checked) j["float_max"] = float_max;
    if (diagnostics) j["determining"] = diagnostics->to_json();
    return j;
}

namespace {


bool curl_free(const Vec3Expr& v) {
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (differentiate(v[a], b + 1) != differentiate(v[b], a + 1)) return false;
    return true;
}

IntegralDiagnostics diagnose(const Expr& f, const Expr& V, const DiffOp& q) {
    IntegralDiagnostics d;
    auto form = second_order_form(q);
    if (!form) return d;
    d.second_order_form = true;
    const auto& [mu, eta] = *form;
    d.m0_zero = is_zero(conformal_killing_residual(mu));
    d.m1_zero = is_zero(residual_m1(f, mu));
    d.m2_printed_zero = is_zero(residual_m2(f, V, mu, eta));
    d.anomaly_zero = is_zero(anomaly(f, mu));
    Vec3Expr v = residual_m2_completed(f, V, mu, eta);
    for (auto& c : v) c = c / f;
    d.completion_curl_free = d.m1_zero && curl_free(v);
    return d;
}

}  // namespace

std::vector<std::string> leading_residuals(const DiffOp& c, std::size_t limit) {
    std::vector<std::string> out;
    for (int s = DiffOp::kSlots - 1; s >= 0 && out.size() < limit; --s) {
        if (c.coeff_at(s).is_zero()) continue;
        const auto& m = DiffOp::index(s);
        out.push_back(truncated("d[" + std::to_string(m[0]) + "," + std::to_string(m[1]) + "," +
                                std::to_string(m[2]) + "]: " + print(c.coeff_at(s))));
    }
    return out;
}

IntegralCheck check_integral(const SystemInstance& s, const IntegralSpec& q, const CheckOptions& opt) {
    IntegralCheck out;
    out.label = q.label;
    const DiffOp H = hamiltonian(s.f, s.V);
    const DiffOp Q = realize(q, s.f, s.V);
    const DiffOp C = commutator(H, Q);
    out.exact_zero = C.is_zero();
    out.commutator_order = C.order();
    if (!out.exact_zero) out.residual = leading_residuals(C);
    const OracleResult exact = residual_suite(H, Q, opt.oracle_points, OraclePath::Exact, opt.salt);
    out.oracle_zero = exact.zero();
    if (out.exact_zero != out.oracle_zero)
        throw InternalError("symbolic commutator and exact oracle disagree for " + s.id + " " + q.label);
    if (opt.float_path || !s.float_values.empty()) {
        const OracleResult fl = residual_suite(H, Q, opt.oracle_points, OraclePath::Float, opt.salt, s.float_values);
        out.float_checked = true;
        out.float_max = fl.float_max;
    }
    if (!out.exact_zero && opt.diagnostics) out.diagnostics = diagnose(s.f, s.V, Q);
    return out;
}

// ---------------------------------------------------------------- correction search

nlohmann::json Correction::to_json() const {
    std::vector<std::string> m;
    for (const auto& x : multipliers) m.push_back(x.get_str());
    return {{"label", label}, {"multipliers", m}, {"integral", text}};
}

nlohmann::json CorrectionSearch::to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& c : variants) v.push_back(c.to_json());
    return {{"variants", v}, {"candidates_tried", candidates_tried},
            {"nullspace_dimension", nullspace_dimension}, {"nullspace", nullspace}};
}

CorrectionSearch correction_search(const SystemInstance& s, const IntegralSpec& q, int budget,
                                   const std::vector<SystemInstance>& confirm) {
    CorrectionSearch out;
    const std::size_t n = q.terms.size();
    const DiffOp H = hamiltonian(s.f, s.V);
    std::vector<DiffOp> comms;
    comms.reserve(n);
    for (const auto& t : q.terms) comms.push_back(commutator(H, realize(t, s.f, s.V)));

    // Numeric images of the per-term commutators at a few points.
    GaussMatrix a;
    for (const auto& p : sample_points(4, fnv1a(s.id))) {
        std::vector<GaussVector> rows;
        try {
            for (int slot = 0; slot < DiffOp::kSlots; ++slot) {
                GaussVector row(n, Gauss(0));
                bool any = false;
                for (std::size_t k = 0; k < n; ++k) {
                    if (comms[k].coeff_at(slot).is_zero()) continue;
                    row[k] = value_at(comms[k].coeff_at(slot), p);
                    any = true;
                }
                if (any) rows.push_back(std::move(row));
            }
        } catch (const Error&) {
            continue;
        }
        for (auto& r : rows) a.append_row(r);
    }
    if (a.rows() == 0) a = GaussMatrix(0, n);
    const auto null = a.cols() == n ? a.nullspace() : std::vector<GaussVector>{};
    out.nullspace_dimension = static_cast<int>(null.size());
    for (const auto& v : null) {
        std::vector<std::string> sv;
        for (const auto& x : v) sv.push_back(x.str());
        out.nullspace.push_back(sv);
    }

    auto numeric_zero = [&](const std::vector<mpq_class>& m) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            Gauss acc(0);
            for (std::size_t k = 0; k < n; ++k)
                if (!a(i, k).is_zero()) acc += a(i, k) * Gauss(m[k]);
            if (!acc.is_zero()) return false;
        }
        return true;
    };
    auto symbolic_zero = [&](const std::vector<mpq_class>& m) {
        DiffOp sum;
        for (std::size_t k = 0; k < n; ++k) sum += Expr(Gauss(m[k])) * comms[k];
        if (!sum.is_zero()) return false;
        for (const auto& other : confirm) {
            for (const auto& oq : other.integrals) {
                if (oq.label != q.label) continue;
                const IntegralSpec v = rescaled(oq, m);
                if (!commutator(hamiltonian(other.f, other.V), realize(v, other.f, other.V)).is_zero()) return false;
            }
        }
        return true;
    };

    static const std::vector<mpq_class> kFactors = {mpq_class(-1), mpq_class(2),     mpq_class(-2), mpq_class(1, 2),
                                                    mpq_class(-1, 2), mpq_class(4), mpq_class(-4)};
    std::vector<std::size_t> chosen;
    // Breadth by budget so that smaller corrections are listed first.
    for (int b = 1; b <= budget; ++b) {
        std::function<void(std::size_t, int)> exact = [&](std::size_t start, int left) {
            if (left == 0) {
                // every factor assignment for the chosen positions
                const auto body = [&] {
                    std::vector<std::size_t> idx(chosen.size(), 0);
                    while (true) {
                        std::vector<mpq_class> m(n, mpq_class(1));
                        for (std::size_t j = 0; j < chosen.size(); ++j) m[chosen[j]] = kFactors[idx[j]];
                        ++out.candidates_tried;
                        if (numeric_zero(m) && symbolic_zero(m)) {
                            Correction c;
                            c.label = q.label;
                            c.multipliers = m;
                            c.text = print(rescaled(q, m));
                            out.variants.push_back(std::move(c));
                        }
                        std::size_t j = 0;
                        while (j < idx.size() && ++idx[j] == kFactors.size()) idx[j++] = 0;
                        if (j == idx.size()) break;
                    }
                };
                body();
                return;
            }
            for (std::size_t k = start; k < n; ++k) {
                chosen.push_back(k);
                exact(k + 1, left - 1);
                chosen.pop_back();
            }
        };
        exact(0, b);
    }
    return out;
}

// ---------------------------------------------------------------- entry verification

std::string status_name(EntryStatus s) {
    switch (s) {
        case EntryStatus::Verified: return "VERIFIED";
        case EntryStatus::Corrected: return "CORRECTED";
        case EntryStatus::Discrepant: return "DISCREPANT";
    }
    return "?";
}

nlohmann::json EntryReport::to_json() const {
    nlohmann::json j;
    j["entry"] = id;
    j["status"] = status_name(status);
    nlohmann::json tr = nlohmann::json::array();
    for (std::size_t k = 0; k < trials.size(); ++k) {
        nlohmann::json t;
        t["binding"] = bindings[k].to_json();
        nlohmann::json ints = nlohmann::json::array();
        for (const auto& c : trials[k]) ints.push_back(c.to_json());
        t["integrals"] = ints;
        tr.push_back(t);
    }
    j["trials"] = tr;
    nlohmann::json corr = nlohmann::json::object();
    for (const auto& [label, c] : corrections) corr[label] = c.to_json();
    j["corrections"] = corr;
    nlohmann::json lj = nlohmann::json::array();
    for (const auto& l : lie) lj.push_back({{"generator", l.generator}, {"commutes", l.commutes}});
    j["lie_symmetry"] = lj;
    j["notes"] = notes;
    return j;
}

EntryReport verify_entry(const CatalogEntry& e, const VerifyOptions& opt) {
    EntryReport rep;
    rep.id = e.id;
    std::mt19937_64 rng(opt.seed ^ fnv1a(e.id));
    std::vector<SystemInstance> instances;
    for (const auto& skeleton : binding_skeletons(e)) {
        for (int t = 0; t < opt.trials; ++t) {
            Binding b = random_binding(e, skeleton, rng);
            instances.push_back(instantiate(e, b));
            rep.bindings.push_back(b);
        }
        // Lie symmetries of the first binding of every skeleton.
        const SystemInstance& s = instances[instances.size() - static_cast<std::size_t>(opt.trials)];
        const DiffOp H = hamiltonian(s.f, s.V);
        for (std::size_t k = 0; k < s.lie.size(); ++k) {
            const bool ok = commutator(H, realize(s.lie[k])).is_zero();
            const std::string name = s.lie_text[k] + (skeleton.choices.empty() && skeleton.function_instance == 0
                                                          ? ""
                                                          : " [" + skeleton.str() + "]");
            rep.lie.push_back({name, ok});
        }
    }
    CheckOptions co;
    co.oracle_points = opt.oracle_points;
    co.float_path = opt.float_path;
    std::map<std::string, std::vector<std::size_t>> failing;  // label -> instance indices
    for (std::size_t i = 0; i < instances.size(); ++i) {
        co.salt = fnv1a(e.id) + i;
        std::vector<IntegralCheck> row;
        for (const auto& q : instances[i].integrals) {
            row.push_back(check_integral(instances[i], q, co));
            if (!row.back().zero()) failing[q.label].push_back(i);
        }
        rep.trials.push_back(std::move(row));
    }
    if (failing.empty()) {
        rep.status = EntryStatus::Verified;
        return rep;
    }
    bool all_resolved = true;
    for (const auto& [label, idx] : failing) {
        const SystemInstance& first = instances[idx.front()];
        const IntegralSpec* q = nullptr;
        for (const auto& it : first.integrals)
            if (it.label == label) q = &it;
        std::vector<SystemInstance> confirm;
        for (std::size_t i = 0; i < instances.size(); ++i)
            if (i != idx.front()) confirm.push_back(instances[i]);
        CorrectionSearch cs = correction_search(first, *q, opt.budget, confirm);
        if (cs.variants.empty()) {
            all_resolved = false;
            rep.notes.push_back(label + ": no correction within budget " + std::to_string(opt.budget) +
                                " (per-term commutator nullspace dimension " +
                                std::to_string(cs.nullspace_dimension) + ")");
        } else {
            rep.notes.push_back(label + ": resolved by rescaling, e.g. " + cs.variants.front().text);
        }
        const auto& d = rep.trials[idx.front()];
        for (const auto& c : d)
            if (c.label == label && c.diagnostics) {
                const auto& g = *c.diagnostics;
                rep.notes.push_back(label + ": printed conditions m0=" + (g.m0_zero ? "ok" : "fail") +
                                    " m1=" + (g.m1_zero ? "ok" : "fail") +
                                    " m2=" + (g.m2_printed_zero ? "ok" : "fail") +
                                    ", ordering anomaly " + (g.anomaly_zero ? "zero" : "nonzero") +
                                    ", scalar completion " + (g.completion_curl_free ? "exists" : "does not exist"));
            }
        rep.corrections[label] = std::move(cs);
    }
    rep.status = all_resolved ? EntryStatus::Corrected : EntryStatus::Discrepant;
    return rep;
}

}  // namespace pdm
