#include "pdm/cli.hpp"

#include "pdm/algebra.hpp"
#include "pdm/catalog.hpp"
#include "pdm/errors.hpp"
#include "pdm/solver.hpp"

#include <fstream>
#include <sstream>

namespace pdm {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j{{"command", cfg.command},
                     {"trials", cfg.trials},
                     {"budget", cfg.budget},
                     {"oracle_points", cfg.oracle_points},
                     {"float", cfg.float_path},
                     {"seed", cfg.seed}};
    if (!cfg.entry.empty()) j["entry"] = cfg.entry;
    if (!cfg.system_path.empty()) j["system"] = cfg.system_path;
    if (!cfg.integral_path.empty()) j["integral"] = cfg.integral_path;
    if (!cfg.problem_path.empty()) j["problem"] = cfg.problem_path;
    return j;
}

nlohmann::json base_report(const RunConfig& cfg) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : sample_points(cfg.oracle_points)) pts.push_back(p.str());
    return {{"schema_version", kReportSchemaVersion}, {"config", config_json(cfg)}, {"points", pts}};
}

/// A system file plus an optional integral file, parsed as one entry. An
/// integral file without section headers is a single integral labelled Q.
CatalogEntry load_user_entry(const std::string& system_path, const std::string& integral_path) {
    std::string text = read_file(system_path);
    if (!integral_path.empty()) {
        std::string q = read_file(integral_path);
        if (q.find('[') == std::string::npos || q.find("[integral") == std::string::npos) q = "[integral Q]\n" + q;
        text += "\n" + q;
    }
    return parse_entry(text);
}

SystemInstance user_instance(const CatalogEntry& e, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return instantiate(e, random_binding(e, binding_skeletons(e).front(), rng));
}

}  // namespace

CommandResult cmd_verify_catalog(const RunConfig& cfg) {
    CommandResult res;
    res.report = base_report(cfg);
    VerifyOptions opt;
    opt.trials = cfg.trials;
    opt.budget = cfg.budget;
    opt.oracle_points = cfg.oracle_points;
    opt.float_path = cfg.float_path;
    opt.seed = cfg.seed;
    std::vector<const CatalogEntry*> entries;
    if (!cfg.entry.empty()) entries.push_back(&catalog_entry(cfg.entry));
    else
        for (const auto& e : builtin_catalog()) entries.push_back(&e);
    nlohmann::json list = nlohmann::json::array();
    std::map<std::string, int> counts;
    for (const auto* e : entries) {
        const EntryReport rep = verify_entry(*e, opt);
        counts[status_name(rep.status)]++;
        if (rep.status == EntryStatus::Discrepant) res.exit_code = 2;
        list.push_back(rep.to_json());
    }
    res.report["entries"] = list;
    res.report["summary"] = counts;
    return res;
}

CommandResult cmd_identities(const RunConfig& cfg) {
    CommandResult res;
    res.report = base_report(cfg);
    const auto ids = verify_identities();
    const auto repairs = verify_identity_repairs();
    const auto c3 = closure_c3();
    const auto so = closure_so14();
    const auto inv = verify_inversion();
    bool ok = c3.closed && so.closed;
    for (const auto& r : ids) ok = ok && r.holds;
    for (const auto& r : inv) ok = ok && r.matches_printed && r.involution;
    res.report["identities"] = to_json(ids);
    res.report["identity_repairs"] = to_json(repairs);
    res.report["closure_c3"] = to_json(c3);
    res.report["closure_so14"] = to_json(so);
    res.report["inversion"] = to_json(inv);
    res.exit_code = ok ? 0 : 2;
    return res;
}

CommandResult cmd_check(const RunConfig& cfg) {
    CommandResult res;
    res.report = base_report(cfg);
    const CatalogEntry e = load_user_entry(cfg.system_path, cfg.integral_path);
    const SystemInstance s = user_instance(e, cfg.seed);
    res.report["system"] = {{"id", e.id}, {"binding", s.binding.to_json()}, {"f", print(s.f)}, {"V", print(s.V)}};
    CheckOptions opt;
    opt.oracle_points = cfg.oracle_points;
    opt.float_path = cfg.float_path;
    nlohmann::json ints = nlohmann::json::array();
    for (const auto& q : s.integrals) {
        const IntegralCheck c = check_integral(s, q, opt);
        nlohmann::json j = c.to_json();
        j["text"] = print(q);
        if (const auto form = second_order_form(realize(q, s.f, s.V))) {
            const DeterminingResidual r = check_all(s.f, s.V, form->first, form->second);
            j["check_all"] = {{"m0", r.m0_zero}, {"m1", r.m1_zero}, {"m2_printed", r.m2_printed_zero},
                              {"m2_complete", r.m2_zero}, {"all_zero", r.all_zero}};
            if (!r.m2_zero) {
                nlohmann::json m2 = nlohmann::json::array();
                for (const auto& v : r.m2_completed) m2.push_back(print(v));
                j["m2_residual"] = m2;
            }
        }
        if (!c.zero()) res.exit_code = 2;
        ints.push_back(j);
    }
    res.report["integrals"] = ints;
    return res;
}

CommandResult cmd_search(const RunConfig& cfg) {
    CommandResult res;
    res.report = base_report(cfg);
    CatalogEntry e = load_user_entry(cfg.problem_path, "");
    if (!e.basis) e.basis = AnsatzBasisText{};
    const SystemInstance s = user_instance(e, cfg.seed);
    AnsatzProblem pb = ansatz_problem(e, s, cfg.seed);
    const AnsatzResult r = ansatz_solve(pb);
    res.report["system"] = {{"id", e.id}, {"binding", s.binding.to_json()}, {"f", print(s.f)}, {"V", print(s.V)}};
    res.report["search"] = r.to_json();
    nlohmann::json rec = nlohmann::json::array();
    for (const auto& x : recover_printed(s, r)) {
        if (!x.recovered) res.exit_code = 2;
        rec.push_back(x.to_json());
    }
    res.report["recovery"] = rec;
    return res;
}

CommandResult run_command(const RunConfig& cfg) {
    try {
        if (cfg.command == "verify-catalog") return cmd_verify_catalog(cfg);
        if (cfg.command == "identities") return cmd_identities(cfg);
        if (cfg.command == "check") return cmd_check(cfg);
        if (cfg.command == "search") return cmd_search(cfg);
        throw Error("unknown command '" + cfg.command + "'");
    } catch (const std::exception& ex) {
        CommandResult res;
        res.exit_code = 1;
        res.report = base_report(cfg);
        res.report["error"] = ex.what();
        return res;
    }
}

// ---------------------------------------------------------------- schema

const nlohmann::json& report_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "pdm report",
  "type": "object",
  "required": ["schema_version", "config", "points"],
  "properties": {
    "schema_version": {"type": "integer"},
    "config": {
      "type": "object",
      "required": ["command", "trials", "budget", "oracle_points", "float", "seed"],
      "properties": {
        "command": {"type": "string"},
        "trials": {"type": "integer"},
        "budget": {"type": "integer"},
        "oracle_points": {"type": "integer"},
        "float": {"type": "boolean"},
        "seed": {"type": "integer"}
      }
    },
    "points": {"type": "array", "items": {"type": "string"}},
    "error": {"type": "string"},
    "entries": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["entry", "status", "trials", "corrections", "lie_symmetry", "notes"],
        "properties": {
          "entry": {"type": "string"},
          "status": {"type": "string"},
          "trials": {"type": "array"},
          "corrections": {"type": "object"},
          "lie_symmetry": {"type": "array"},
          "notes": {"type": "array", "items": {"type": "string"}}
        }
      }
    },
    "summary": {"type": "object"},
    "identities": {"type": "array"},
    "identity_repairs": {"type": "array"},
    "closure_c3": {"type": "object"},
    "closure_so14": {"type": "object"},
    "inversion": {"type": "array"},
    "system": {"type": "object", "required": ["id", "binding", "f", "V"]},
    "integrals": {"type": "array"},
    "search": {
      "type": "object",
      "required": ["unknowns", "rows", "nullspace_dimension", "rejected", "solutions"],
      "properties": {"solutions": {"type": "array"}}
    },
    "recovery": {"type": "array"}
  }
})");
    return schema;
}

namespace {

bool type_matches(const nlohmann::json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "integer") return v.is_number_integer();
    if (type == "number") return v.is_number();
    if (type == "boolean") return v.is_boolean();
    return true;
}

std::string validate(const nlohmann::json& v, const nlohmann::json& schema, const std::string& path) {
    if (schema.contains("type") && !type_matches(v, schema["type"].get<std::string>()))
        return path + ": expected " + schema["type"].get<std::string>();
    if (v.is_object()) {
        if (schema.contains("required"))
            for (const auto& k : schema["required"])
                if (!v.contains(k.get<std::string>())) return path + ": missing '" + k.get<std::string>() + "'";
        if (schema.contains("properties"))
            for (const auto& [k, sub] : schema["properties"].items())
                if (v.contains(k))
                    if (auto err = validate(v[k], sub, path + "/" + k); !err.empty()) return err;
    }
    if (v.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& item : v)
            if (auto err = validate(item, schema["items"], path + "/" + std::to_string(i++)); !err.empty())
                return err;
    }
    return "";
}

}  // namespace

std::string validate_report(const nlohmann::json& report) { return validate(report, report_schema(), ""); }

}  // namespace pdm
