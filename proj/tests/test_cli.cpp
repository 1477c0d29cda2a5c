#include "doctest.h"

#include "pdm/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace pdm;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("pdm_test_" + name);
    std::ofstream(path) << content;
    return path.string();
}

RunConfig config(const std::string& command) {
    RunConfig cfg;
    cfg.command = command;
    cfg.trials = 1;
    return cfg;
}

const char* kFreeParticle = "[system]\nid = free\nf = 1\nV = 0\n";

}  // namespace

TEST_CASE("cli: single verified entry exits 0 with a valid report") {
    RunConfig cfg = config("verify-catalog");
    cfg.entry = "T1.6";
    const CommandResult r = run_command(cfg);
    CHECK(r.exit_code == 0);
    CHECK(validate_report(r.report).empty());
    REQUIRE(r.report["entries"].size() == 1);
    CHECK(r.report["entries"][0]["status"] == "VERIFIED");
    CHECK(r.report["points"].size() == 8);
}

TEST_CASE("cli: discrepant entry exits 2 and reports residuals") {
    RunConfig cfg = config("verify-catalog");
    cfg.entry = "T2.4";
    cfg.budget = 1;
    const CommandResult r = run_command(cfg);
    CHECK(r.exit_code == 2);
    CHECK(validate_report(r.report).empty());
    const auto& ints = r.report["entries"][0]["trials"][0]["integrals"];
    CHECK_FALSE(ints[0]["residuals"].empty());
}

TEST_CASE("cli: fixed seed gives byte-identical reports") {
    RunConfig cfg = config("verify-catalog");
    cfg.entry = "T2.6";
    cfg.seed = 42;
    CHECK(run_command(cfg).report.dump() == run_command(cfg).report.dump());
}

TEST_CASE("cli: identities report carries the closure table") {
    const CommandResult r = run_command(config("identities"));
    CHECK(r.exit_code != 1);
    CHECK(validate_report(r.report).empty());
    CHECK(r.report["closure_so14"]["closed"] == true);
    CHECK(r.report["identities"].size() > 0);
}

TEST_CASE("cli: check a user system, a wrong eta, and a parse error") {
    RunConfig cfg = config("check");
    cfg.system_path = temp_file("sys", kFreeParticle);
    cfg.integral_path = temp_file("q_ok", "{P1, D} - 2*(x1 . H)\n");
    CommandResult r = run_command(cfg);
    CHECK(r.exit_code == 0);
    CHECK(validate_report(r.report).empty());

    cfg.integral_path = temp_file("q_bad", "P3^2 + x3\n");
    r = run_command(cfg);
    CHECK(r.exit_code == 2);
    CHECK(r.report["integrals"][0].contains("m2_residual"));

    cfg.integral_path = temp_file("q_syntax", "P3^2 + (x3\n");
    r = run_command(cfg);
    CHECK(r.exit_code == 1);
    CHECK(r.report["error"].get<std::string>().find("position") != std::string::npos);
}

TEST_CASE("cli: check a generated family file") {
    RunConfig cfg = config("check");
    cfg.system_path = temp_file("family", "[system]\nid = fam\nf = 1/(3 + x1^2 + x3)\nV = (x2 + x3^2)/(3 + x1^2 + x3)\n");
    cfg.integral_path = temp_file("family_q", "[integral Q2]\nP3^2 - (x3 . H) + x3^2\n");
    const CommandResult r = run_command(cfg);
    CHECK(r.exit_code != 1);
    CHECK(r.report["integrals"][0]["check_all"]["m1"] == true);
    CHECK(r.report["integrals"][0]["check_all"]["m2_printed"] == true);
}

TEST_CASE("cli: search with an empty basis and with the free particle") {
    RunConfig cfg = config("search");
    cfg.problem_path = temp_file("empty", std::string(kFreeParticle) + "[basis]\n");
    CommandResult r = run_command(cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.report["search"]["solutions"].empty());

    cfg.problem_path = temp_file("free", std::string(kFreeParticle) + "[basis]\nfamilies = 1\n[dictionary]\neta = 1\n");
    r = run_command(cfg);
    CHECK(r.exit_code == 0);
    CHECK(validate_report(r.report).empty());
    // five constant traceless tensors plus the constant
    CHECK(r.report["search"]["solutions"].size() == 6);
}

TEST_CASE("cli: operational errors exit 1") {
    CHECK(run_command(config("nonsense")).exit_code == 1);
    RunConfig cfg = config("check");
    cfg.system_path = "/nonexistent/file";
    CHECK(run_command(cfg).exit_code == 1);
    RunConfig v = config("verify-catalog");
    v.entry = "T9.9";
    CHECK(run_command(v).exit_code == 1);
}

TEST_CASE("cli: schema validation catches missing keys") {
    nlohmann::json bad = {{"schema_version", 1}};
    CHECK_FALSE(validate_report(bad).empty());
    nlohmann::json wrong = {{"schema_version", "1"}, {"config", nlohmann::json::object()}, {"points", nlohmann::json::array()}};
    CHECK_FALSE(validate_report(wrong).empty());
}
