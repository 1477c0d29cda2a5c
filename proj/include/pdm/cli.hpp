#pragma once

// Batch commands behind the command-line tool. Each command returns an exit
// code (0: everything verified, 2: discrepancies found, 1: operational error)
// and a deterministic JSON report.

#include <json.hpp>

#include <cstdint>
#include <string>

namespace pdm {

inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
    std::string command;
    std::string entry;          // verify-catalog: single entry id (empty: all)
    std::string system_path;    // check
    std::string integral_path;  // check
    std::string problem_path;   // search
    int trials = 3;
    int budget = 2;
    int oracle_points = 8;
    bool float_path = false;
    std::string out_path;
    std::uint64_t seed = 1;
};

struct CommandResult {
    int exit_code = 0;
    nlohmann::json report;
};

CommandResult cmd_verify_catalog(const RunConfig& cfg);
CommandResult cmd_identities(const RunConfig& cfg);
CommandResult cmd_check(const RunConfig& cfg);
CommandResult cmd_search(const RunConfig& cfg);

/// Dispatches on cfg.command; operational errors become exit code 1 with an
/// "error" field in the report.
CommandResult run_command(const RunConfig& cfg);

/// The JSON schema the reports follow.
const nlohmann::json& report_schema();
/// Checks a report against report_schema() (required keys and types);
/// returns an empty string when valid, otherwise the first violation.
std::string validate_report(const nlohmann::json& report);

}  // namespace pdm
