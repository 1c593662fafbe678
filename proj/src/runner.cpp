#include "bvcalc/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include "bvcalc/bv_ops.hpp"
#include "bvcalc/chain_rule.hpp"
#include "bvcalc/claw.hpp"
#include "bvcalc/pwc_approx.hpp"
#include "bvcalc/random_models.hpp"

namespace bvcalc {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// A case returns its row plus optional lines for a shared data file.
struct CaseOutput {
    ReportRow row;
    std::string data;
};

struct Case {
    std::string id;
    std::function<CaseOutput()> run;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string label(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    return s;
}

/// Quadrature tolerance well below the acceptance tolerance.
double quadrature_tol(double tol) { return std::clamp(0.01 * tol, 1e-12, 1e-9); }

bool within(double residual, double lhs, double tol) {
    return std::isfinite(residual) && std::abs(residual) <= tol * (1.0 + std::abs(lhs));
}

class Builder {
public:
    Builder(const Scenario& sc, double tol) : sc_(sc), tol_(tol) {}

    CaseOutput row(const std::string& id, double lhs, std::array<double, 5> terms, double residual, bool pass) const {
        return {{sc_.id, id, lhs, terms, residual, tol_, pass}, {}};
    }

private:
    const Scenario& sc_;
    double tol_;
};

PiecewiseConstant as_step_function(const BVFunction& u) {
    if (u.has_cantor()) throw PreconditionError("comparison-check needs a step function without Cantor part");
    const auto& s = u.smooth();
    std::vector<double> partition(s.breaks().begin(), s.breaks().end());
    std::vector<double> values, nodes;
    for (const auto& p : s.pieces()) {
        if (p.degree() > 0) throw PreconditionError("comparison-check needs piecewise constant u");
        values.push_back(p.is_zero() ? 0.0 : p.coefficients()[0]);
    }
    for (std::size_t i = 1; i + 1 < partition.size(); ++i) nodes.push_back(u.eval(partition[i]));
    return PiecewiseConstant(std::move(partition), std::move(values), std::move(nodes));
}

Integrand smooth_integrand(const SmoothFunction& g) {
    Integrand f;
    f.fn = [g](double x) { return g(x); };
    return f;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

bool RunResult::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    out << "scenario,case,lhs,t1,t2,t3,t4,t5,residual,tol,pass\n";
    for (const auto& r : rows) {
        out << r.scenario << ',' << r.case_id << ',' << num(r.lhs);
        for (double t : r.terms) out << ',' << num(t);
        out << ',' << num(r.residual) << ',' << num(r.tol) << ',' << (r.pass ? "pass" : "fail") << '\n';
    }
}

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    const double tol = opt.tol.value_or(sc.tol);
    const std::uint64_t seed = opt.seed.value_or(sc.seed);
    const double qtol = quadrature_tol(tol);
    const Builder b(sc, tol);
    std::mt19937_64 rng(seed);

    std::vector<TestFunction> phis = sc.test_functions;
    for (int i = 0; i < sc.random_test_functions; ++i) phis.push_back(random_test_function(rng, sc.domain));

    std::vector<Case> cases;
    std::string data_file, data_header;
    std::filesystem::create_directories(opt.out_dir);
    RunResult result;

    switch (sc.kind) {
        case ScenarioKind::chainrule_verify: {
            auto add = [&](const std::string& prefix, std::shared_ptr<const FluxModel> B,
                           std::shared_ptr<const BVVector> U, const std::vector<TestFunction>& tests) {
                for (std::size_t j = 0; j < tests.size(); ++j) {
                    const std::string id = prefix + "phi" + std::to_string(j + 1);
                    cases.push_back({id, [&b, B, U, phi = tests[j], id, qtol, tol] {
                                         const auto r = chainrule_terms(*B, *U, phi, qtol);
                                         return b.row(id, r.lhs, r.terms, r.residual, within(r.residual, r.lhs, tol));
                                     }});
                }
            };
            if (sc.flux)
                add("", std::make_shared<const FluxModel>(*sc.flux), std::make_shared<const BVVector>(BVVector(sc.u)),
                    phis);
            for (int i = 0; i < sc.random.cases; ++i) {
                auto c = random_chain_case(rng, static_cast<std::size_t>(sc.random.test_functions));
                char prefix[24];
                std::snprintf(prefix, sizeof prefix, "r%03d.", i + 1);
                add(prefix, std::make_shared<const FluxModel>(std::move(c.B)),
                    std::make_shared<const BVVector>(std::move(c.u)), c.phis);
            }
            break;
        }
        case ScenarioKind::comparison_check: {
            auto B = std::make_shared<const FluxModel>(*sc.flux);
            auto U = std::make_shared<const BVVector>(BVVector(sc.u));
            for (std::size_t j = 0; j < phis.size(); ++j) {
                const std::string tag = "phi" + std::to_string(j + 1);
                cases.push_back({"volpert." + tag, [&b, B, U, phi = phis[j], tag, qtol, tol] {
                                     const auto [levels, cells] =
                                         volpert_comparison_pwc(*B, as_step_function((*U)[0]), phi, qtol);
                                     const double r = levels - cells;
                                     return b.row("volpert." + tag, levels, {cells, 0, 0, 0, 0}, r,
                                                  within(r, levels, tol));
                                 }});
                cases.push_back({"cells." + tag, [&b, B, U, phi = phis[j], tag, qtol, tol] {
                                     as_step_function((*U)[0]);
                                     const auto [terms, cells] = step_function_consistency(*B, *U, phi, qtol);
                                     const double r = terms - cells;
                                     return b.row("cells." + tag, terms, {cells, 0, 0, 0, 0}, r, within(r, terms, tol));
                                 }});
            }
            break;
        }
        case ScenarioKind::coarea_check: {
            auto u = std::make_shared<const BVFunction>(sc.u[0]);
            const Integrand g = smooth_integrand(sc.coarea.g);
            cases.push_back({"coarea", [&b, u, g, qtol, tol] {
                                 const double l = coarea_lhs(g, *u, qtol);
                                 const double r = coarea_rhs(g, *u, qtol);
                                 return b.row("coarea", l, {r, 0, 0, 0, 0}, l - r, within(l - r, l, tol));
                             }});
            for (std::size_t j = 0; j < phis.size(); ++j) {
                const std::string id = "parts.phi" + std::to_string(j + 1);
                cases.push_back({id, [&b, u, phi = phis[j], id, qtol, tol, &sc] {
                                     QuadratureOptions q;
                                     q.tol = qtol;
                                     const double l = integrate_lebesgue(
                                         product(u->integrand(), phi.derivative_integrand()), sc.domain.a, sc.domain.b, q);
                                     const double r = integration_by_parts_residual(*u, phi, qtol);
                                     return b.row(id, l, {r - l, 0, 0, 0, 0}, r, within(r, l, tol));
                                 }});
            }
            break;
        }
        case ScenarioKind::approx_demo: {
            data_file = "approx.csv";
            data_header = "case,x,u,v\n";
            const ExceptionalSet exc = ExceptionalSet::prefix(sc.approx.P, sc.approx.P_eps);
            for (std::size_t k = 0; k < sc.u.size(); ++k) {
                for (double eps : sc.approx.eps) {
                    const std::string id = "u" + std::to_string(k + 1) + ".eps=" + num(eps);
                    cases.push_back({id, [&b, &sc, exc, k, eps, id, tol] {
                                         const BVFunction& u = sc.u[k];
                                         ApproxInfo info;
                                         const auto pc = approximate_scalar(u, eps, exc, &info);
                                         std::vector<double> xs;
                                         const int n = sc.approx.samples;
                                         for (int j = 0; j < n; ++j)
                                             xs.push_back(sc.domain.a + (j + 0.5) * sc.domain.length() / n);
                                         std::vector<double> probes = xs;
                                         for (double p : exc.P) probes.push_back(p);
                                         for (double p : u.breakpoints()) probes.push_back(p);
                                         const auto& part = pc.partition();
                                         probes.insert(probes.end(), part.begin() + 1, part.end() - 1);
                                         double err = 0.0;
                                         for (double x : probes) err = std::max(err, std::abs(pc.eval(x) - u.eval(x)));
                                         double match = 0.0;
                                         for (double p : exc.P_eps) match = std::max(match, std::abs(pc.eval(p) - u.eval(p)));
                                         const double tv_v = pc.total_variation();
                                         const double tv_u = total_variation(u);
                                         const double r = std::max({err - eps, tv_v - tv_u, match});
                                         CaseOutput out = b.row(id, err,
                                                                {tv_v, tv_u, static_cast<double>(pc.cells()),
                                                                 static_cast<double>(info.big_jumps), info.delta},
                                                                r, r <= tol);
                                         std::string lines;
                                         for (double x : xs)
                                             lines += id + ',' + num(x) + ',' + num(u.eval(x)) + ',' + num(pc.eval(x)) + '\n';
                                         out.data = std::move(lines);
                                         return out;
                                     }});
                }
            }
            break;
        }
        case ScenarioKind::claw_run:
        case ScenarioKind::entropy_check: try {
            const ScalarFlux flux(*sc.flux, *sc.claw.range, sc.claw.samples);
            auto field = std::make_shared<const ClawField>(
                solve_claw(flux, sc.u[0], sc.claw.T, sc.claw.cells, sc.claw.cfl));
            if (sc.claw.write_field) {
                std::ostringstream out;
                write_field_csv(out, *field, true);
                write_file(opt.out_dir / "field.csv", out.str());
                result.files.push_back("field.csv");
            }
            if (sc.kind == ScenarioKind::claw_run) {
                cases.push_back({"solve", [&b, field, tol] {
                                     const std::size_t last = field->states.size() - 1;
                                     double drift = 0.0, umax = 0.0;
                                     for (double d : field->mass_drift) drift = std::max(drift, d);
                                     for (double u : field->states[last]) umax = std::max(umax, std::abs(u));
                                     return b.row("solve", field->mass(last),
                                                  {field->mass(0), static_cast<double>(last), umax, field->cfl,
                                                   field->dx},
                                                  drift, drift <= tol);
                                 }});
                break;
            }
            const SpaceTimeTest phi{
                sc.claw.phi_x.value_or(TestFunction::bump(sc.domain.midpoint(), 0.45 * sc.domain.length())),
                sc.claw.phi_t.value_or(TestFunction::bump(0.5 * sc.claw.T, 0.45 * sc.claw.T))};
            auto check = [&](const std::string& id, EntropyFluxPair pair) {
                cases.push_back({id, [&b, field, flux, pair = std::move(pair), phi, id, tol] {
                                     const double r = entropy_residual(*field, flux, pair, phi);
                                     return b.row(id, r, {0, 0, 0, 0, 0}, r, r <= tol);
                                 }});
            };
            for (double alpha : adapted_levels(flux, sc.claw.alphas))
                check("adapted.alpha=" + num(alpha), adapted_entropy_pair(flux, alpha));
            for (const auto& eta : sc.claw.convex) {
                auto pair = convex_entropy_pair(flux, eta);
                check("convex." + label(eta.text()), pair);
                if (sc.claw.affine_N > 0)
                    check("affine" + std::to_string(sc.claw.affine_N) + "." + label(eta.text()),
                          affine_entropy_pair(pair, flux, sc.claw.affine_N));
            }
            break;
        } catch (const std::exception& ex) {
            cases.push_back({"solve", [msg = std::string(ex.what())]() -> CaseOutput { throw std::runtime_error(msg); }});
            break;
        }
    }

    std::vector<CaseOutput> outputs(cases.size());
    std::vector<double> seconds(cases.size(), 0.0);
    std::vector<std::string> errors(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                outputs[i] = cases[i].run();
            } catch (const std::exception& ex) {
                outputs[i] = b.row(cases[i].id, nan, {nan, nan, nan, nan, nan}, nan, false);
                errors[i] = cases[i].id + ": " + ex.what();
            }
            seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const int jobs = std::clamp(opt.jobs, 1, static_cast<int>(std::max<std::size_t>(cases.size(), 1)));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string data = data_header;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        result.rows.push_back(std::move(outputs[i].row));
        data += outputs[i].data;
        if (!errors[i].empty()) result.errors.push_back(std::move(errors[i]));
    }
    result.seconds = std::move(seconds);

    std::ostringstream report;
    write_report_csv(report, result.rows);
    write_file(opt.out_dir / "report.csv", report.str());
    result.files.insert(result.files.begin(), "report.csv");

    std::ostringstream timing;
    timing << "scenario,case,seconds\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", result.seconds[i]);
        timing << result.rows[i].scenario << ',' << result.rows[i].case_id << ',' << buf << '\n';
    }
    write_file(opt.out_dir / "timing.csv", timing.str());
    result.files.push_back("timing.csv");
    if (!data_file.empty()) {
        write_file(opt.out_dir / data_file, data);
        result.files.push_back(data_file);
    }
    return result;
}

}  // namespace bvcalc
