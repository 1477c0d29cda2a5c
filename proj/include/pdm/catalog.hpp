#pragma once

// Machine-readable catalog of the classified systems: one text file per
// table entry (inverse mass f, potential V, parameters, arbitrary-function
// samples, Lie symmetries and the printed second-order integrals), plus
// instantiation at parameter bindings, verification and the coefficient
// correction search.

#include "pdm/diffop.hpp"
#include "pdm/oracle.hpp"
#include "pdm/parse.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pdm {

struct NamedText {
    std::string name;
    std::string text;
};

/// An arbitrary function of the entry, e.g. F(phi), with sample instances.
struct FunctionSlot {
    std::string name;
    std::string argument;
    std::vector<std::string> instances;
};

/// A discrete sign choice such as eps = 1, -1 (each value is a separate system).
struct ChoiceSlot {
    std::string name;
    std::vector<long> values;
};

/// Basis of an ansatz search: Killing families (0..9 as in killing.hpp),
/// eta dictionary and g dictionary (coefficient of the delta^{ab} g term).
struct AnsatzBasisText {
    std::vector<int> families;
    std::vector<std::string> eta;
    std::vector<std::string> g;
};

struct CatalogEntry {
    std::string id;
    std::string comment;
    std::vector<std::string> params;    // bound to random constants per trial
    std::vector<std::string> symbolic;  // kept as free symbols
    std::vector<ChoiceSlot> choices;
    std::vector<NamedText> defines;     // abbreviations such as R1 = r^2 + 1
    std::vector<NamedText> generators;  // user generators, w = exp(...)
    std::vector<FunctionSlot> functions;
    std::string f;
    std::string V;
    std::string family;
    std::vector<std::string> lie;
    std::vector<NamedText> integrals;   // label -> printed integral
    std::optional<AnsatzBasisText> basis;
};

/// Parses the sectioned text format. Throws SyntaxError with the byte offset
/// of the offending line.
CatalogEntry parse_entry(const std::string& text);
/// Text form accepted by parse_entry (round-trips).
std::string serialize(const CatalogEntry& e);
/// Loads every *.sys file of a directory, sorted by entry id (T1.2 < T1.10).
std::vector<CatalogEntry> load_catalog(const std::string& dir);
/// The catalog shipped with the sources.
const std::vector<CatalogEntry>& builtin_catalog();
const CatalogEntry& catalog_entry(const std::string& id);
/// Natural ordering of ids: table, then item number.
bool id_less(const std::string& a, const std::string& b);

/// Registers the user generator defined by `text` (exp(c1*lrt + c2*phi + c3*theta)
/// with coordinate-free coefficients and no constant term, or rt^(p/q)).
VarId define_generator(const std::string& name, const std::string& text, const ParseContext& ctx);

struct Binding {
    std::map<std::string, Gauss> values;  // parameter -> constant
    std::map<std::string, long> choices;  // choice -> value
    int function_instance = 0;
    std::string str() const;
    nlohmann::json to_json() const;
};

struct SystemInstance {
    std::string id;
    Binding binding;
    ParseContext ctx;
    Expr f;
    Expr V;
    std::vector<IntegralSpec> integrals;
    std::vector<GenComb> lie;
    std::vector<std::string> lie_text;
    /// Float-path values of the symbolic parameters.
    std::map<std::string, double> float_values;
};

/// Builds f, V and the integrals at a binding. Throws UnknownSymbol for a
/// missing parameter and DivisionByZero on a degenerate binding.
SystemInstance instantiate(const CatalogEntry& e, const Binding& b);

/// Number of distinct systems (choice combinations x function instances).
std::vector<Binding> binding_skeletons(const CatalogEntry& e);
/// Fills the parameters with small odd integers; redraws degenerate bindings.
Binding random_binding(const CatalogEntry& e, Binding skeleton, std::mt19937_64& rng);

/// Multiplies term k's coefficient by multipliers[k].
IntegralSpec rescaled(const IntegralSpec& q, const std::vector<mpq_class>& multipliers);

struct IntegralDiagnostics {
    bool second_order_form = false;  // realized integral is p mu p + eta
    bool m0_zero = false;
    bool m1_zero = false;
    bool m2_printed_zero = false;
    bool anomaly_zero = false;
    bool completion_curl_free = false;  // a scalar completion of eta exists
    nlohmann::json to_json() const;
};

struct IntegralCheck {
    std::string label;
    bool exact_zero = false;
    bool oracle_zero = false;   // exact path at the sample points
    bool float_checked = false;
    double float_max = 0.0;
    int commutator_order = -1;
    std::vector<std::string> residual;  // leading nonzero coefficients
    std::optional<IntegralDiagnostics> diagnostics;
    bool zero() const { return exact_zero && oracle_zero && (!float_checked || float_max <= 1e-10); }
    nlohmann::json to_json() const;
};

struct CheckOptions {
    int oracle_points = 8;
    bool float_path = false;
    std::uint64_t salt = 0;
    bool diagnostics = true;
};

/// Symbolic commutator plus oracle cross-check of one integral of an instance.
IntegralCheck check_integral(const SystemInstance& s, const IntegralSpec& q, const CheckOptions& opt);

/// The highest-order nonzero coefficients of an operator, printed.
std::vector<std::string> leading_residuals(const DiffOp& c, std::size_t limit = 3);

struct Correction {
    std::string label;
    std::vector<mpq_class> multipliers;
    std::string text;  // corrected integral in table notation
    nlohmann::json to_json() const;
};

struct CorrectionSearch {
    std::vector<Correction> variants;  // all variants within budget that verify
    int candidates_tried = 0;
    int nullspace_dimension = 0;  // of the per-term commutator map
    std::vector<std::vector<std::string>> nullspace;  // basis, as term multipliers
    nlohmann::json to_json() const;
};

/// Rescales up to `budget` term coefficients by {-1, +-2, +-1/2, +-4}; the
/// per-term commutators are prefiltered numerically, confirmed symbolically
/// on `s`, and then re-verified on every instance of `confirm`.
CorrectionSearch correction_search(const SystemInstance& s, const IntegralSpec& q, int budget,
                                   const std::vector<SystemInstance>& confirm = {});

enum class EntryStatus { Verified, Corrected, Discrepant };
std::string status_name(EntryStatus s);

struct VerifyOptions {
    int trials = 3;
    int budget = 2;
    int oracle_points = 8;
    bool float_path = false;
    std::uint64_t seed = 1;
};

struct LieCheck {
    std::string generator;
    bool commutes = false;
};

struct EntryReport {
    std::string id;
    EntryStatus status = EntryStatus::Discrepant;
    std::vector<Binding> bindings;
    std::vector<std::vector<IntegralCheck>> trials;  // per binding, per integral
    std::map<std::string, CorrectionSearch> corrections;  // per failing integral label
    std::vector<LieCheck> lie;
    std::vector<std::string> notes;
    nlohmann::json to_json() const;
};

EntryReport verify_entry(const CatalogEntry& e, const VerifyOptions& opt);

}  // namespace pdm
