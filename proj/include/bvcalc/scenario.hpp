#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bvcalc/bv_function.hpp"
#include "bvcalc/flux_model.hpp"

namespace bvcalc {

/// Parse or validation failure with a "source:line: [section] field 'x'"
/// prefix.
class ScenarioError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

enum class ScenarioKind { chainrule_verify, approx_demo, coarea_check, claw_run, entropy_check, comparison_check };

std::string_view kind_name(ScenarioKind kind);

struct RandomCaseSettings {
    int cases = 0;
    int test_functions = 5;
};

struct ClawSettings {
    std::optional<Bounds> range;
    double T = 0.0;
    int cells = 0;
    double cfl = 0.45;
    int samples = 64;
    bool write_field = true;
    /// Number of adapted levels checked by entropy-check.
    int alphas = 9;
    /// x-independent convex entropies checked by entropy-check.
    std::vector<SmoothFunction> convex;
    /// Resolution of the affine approximations; 0 skips them.
    int affine_N = 0;
    std::optional<TestFunction> phi_x;
    std::optional<TestFunction> phi_t;
};

struct ApproxSettings {
    std::vector<double> eps;
    std::vector<double> P;
    std::size_t P_eps = 0;
    int samples = 2001;
};

struct CoareaSettings {
    SmoothFunction g;
};

/// A parsed scenario file; every model object is already validated.
struct Scenario {
    std::string source;
    ScenarioKind kind = ScenarioKind::chainrule_verify;
    std::string id;
    Interval domain{0.0, 1.0};
    double tol = 1e-9;
    std::uint64_t seed = 0;

    std::optional<FluxModel> flux;
    std::vector<BVFunction> u;
    std::vector<TestFunction> test_functions;
    int random_test_functions = 0;
    RandomCaseSettings random;
    ClawSettings claw;
    ApproxSettings approx;
    CoareaSettings coarea;
};

/// Parses the key-value format documented in the README. Throws
/// ScenarioError naming the line and the field.
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");

/// Reads and parses a file; unreadable files raise ScenarioError too.
Scenario load_scenario(const std::string& path);

}  // namespace bvcalc
