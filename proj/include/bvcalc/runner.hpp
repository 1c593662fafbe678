#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvcalc/scenario.hpp"

namespace bvcalc {

/// One line of report.csv. Columns other than lhs and residual are reused
/// per scenario kind as documented in the README.
struct ReportRow {
    std::string scenario;
    std::string case_id;
    double lhs = 0.0;
    std::array<double, 5> terms{};
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct RunOptions {
    std::filesystem::path out_dir;
    /// Override the scenario values when set.
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

struct RunResult {
    std::vector<ReportRow> rows;
    /// Wall-clock seconds per row.
    std::vector<double> seconds;
    /// Messages from cases that threw; such rows fail.
    std::vector<std::string> errors;
    /// Files written, relative to the output directory.
    std::vector<std::string> files;

    bool all_pass() const;
};

/// Runs every case of the scenario, writes report.csv, timing.csv and the
/// kind-specific data files into opt.out_dir, and returns the rows in
/// scenario order.
RunResult run_scenario(const Scenario& scenario, const RunOptions& opt);

/// Header and rows with %.17g numbers.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace bvcalc
