// Command-line entry point: verify the catalog, run the identity and closure
// suites, check user systems and run ansatz searches, writing JSON reports.

#include "pdm/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    pdm::RunConfig cfg;
    CLI::App app{"Exact verification of second-order integrals of motion for position-dependent mass systems"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", cfg.seed, "Random seed (determines every draw)");
    app.add_option("--oracle-points", cfg.oracle_points, "Sample points of the pointwise oracle")->check(CLI::Range(1, 64));
    app.add_flag("--float", cfg.float_path, "Also run the floating-point oracle path");
    app.add_option("--out", cfg.out_path, "Write the JSON report to this file (default: stdout)");

    auto* verify = app.add_subcommand("verify-catalog", "Verify every catalog entry");
    verify->add_option("--entry", cfg.entry, "Single entry id, e.g. T1.5");
    verify->add_option("--trials", cfg.trials, "Random parameter bindings per entry")->check(CLI::Range(1, 100));
    verify->add_option("--budget", cfg.budget, "Correction search budget (terms rescaled)")->check(CLI::Range(0, 4));

    app.add_subcommand("identities", "Identity suite, closure tables and inversion");

    auto* check = app.add_subcommand("check", "Check a user system and integral");
    check->add_option("--system", cfg.system_path, "System file")->required();
    check->add_option("--integral", cfg.integral_path, "Integral file");

    auto* search = app.add_subcommand("search", "Ansatz search for integrals");
    search->add_option("--problem", cfg.problem_path, "Problem file ([system] and [basis]/[dictionary])")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    const pdm::CommandResult res = pdm::run_command(cfg);
    const std::string text = res.report.dump(2) + "\n";
    if (cfg.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) {
            std::cerr << "cannot write '" << cfg.out_path << "'\n";
            return 1;
        }
        out << text;
    }
    if (res.report.contains("error")) std::cerr << "error: " << res.report["error"].get<std::string>() << "\n";
    return res.exit_code;
}
