#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "bvcalc/runner.hpp"
#include "bvcalc/scenario.hpp"

namespace {

constexpr int exit_fail = 1;
constexpr int exit_parse = 2;
constexpr int exit_runtime = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bvcalc: scenario runner for the BV chain-rule and conservation-law checks"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    double tol = 0.0;
    std::uint64_t seed = 0;
    int jobs = 1;
    auto* run = app.add_subcommand("run", "run a scenario file and write report.csv into the output directory");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    auto* out_opt = run->add_option("--out", out_dir, "output directory (default: $BVCALC_OUT)");
    auto* tol_opt = run->add_option("--tol", tol, "override the scenario tolerance")->check(CLI::PositiveNumber);
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--jobs", jobs, "worker threads for independent cases")->check(CLI::Range(1, 256));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_parse;
    }

    if (out_opt->count() == 0) {
        if (const char* env = std::getenv("BVCALC_OUT"); env && *env) {
            out_dir = env;
        } else {
            std::cerr << "bvcalc: no output directory; pass --out or set BVCALC_OUT\n";
            return exit_parse;
        }
    }

    bvcalc::Scenario sc;
    try {
        sc = bvcalc::load_scenario(scenario_path);
    } catch (const std::exception& e) {
        std::cerr << "bvcalc: " << e.what() << '\n';
        return exit_parse;
    }

    bvcalc::RunOptions opt;
    opt.out_dir = out_dir;
    if (tol_opt->count()) opt.tol = tol;
    if (seed_opt->count()) opt.seed = seed;
    opt.jobs = jobs;

    bvcalc::RunResult result;
    try {
        result = bvcalc::run_scenario(sc, opt);
    } catch (const std::exception& e) {
        std::cerr << "bvcalc: " << sc.id << ": " << e.what() << '\n';
        return exit_runtime;
    }
    for (const auto& msg : result.errors) std::cerr << "bvcalc: " << sc.id << ": " << msg << '\n';

    std::size_t passed = 0;
    for (const auto& r : result.rows) passed += r.pass ? 1 : 0;
    std::printf("%s [%s]: %zu/%zu cases pass, wrote", sc.id.c_str(), std::string(bvcalc::kind_name(sc.kind)).c_str(),
                passed, result.rows.size());
    for (const auto& f : result.files) std::printf(" %s", f.c_str());
    std::printf("\n");
    return result.all_pass() ? 0 : exit_fail;
}
