#include <doctest.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "bvcalc/bv_ops.hpp"
#include "bvcalc/chain_rule.hpp"
#include "bvcalc/errors.hpp"
#include "bvcalc/random_models.hpp"

using namespace bvcalc;

namespace {

const Interval unit{0.0, 1.0};
const CantorBase standard(0.0, 1.0);

BVFunction H(double lo = 0.0, double hi = 1.0) { return BVFunction::heaviside(unit, 0.5, lo, hi); }
BVFunction V() { return BVFunction::cantor_function(unit, standard); }
BVFunction X() { return BVFunction::polynomial(unit, Polynomial({0.0, 1.0})); }
BVFunction constant(double c) { return BVFunction::constant(unit, c); }

FluxModel single(BVFunction K, const std::string& f, std::size_t d = 1) {
    return FluxModel({FluxTerm{std::move(K), SmoothFunction::parse(f, d)}});
}

// Unit bump at 1/2 and four others with supports inside ]0, 1[.
std::vector<TestFunction> probes() {
    return {TestFunction::bump(0.5, 0.4), TestFunction::bump(0.45, 0.3, 1.7), TestFunction::bump(0.6, 0.35, 0.6),
            TestFunction::bump_times(0.5, 0.45, Polynomial({1.0, -0.8})),
            TestFunction::bump_times(0.4, 0.3, Polynomial({0.2, 1.5}))};
}

double sum(const std::array<double, 5>& t) { return t[0] + t[1] + t[2] + t[3] + t[4]; }

}  // namespace

TEST_SUITE("flux model") {
    TEST_CASE("evaluation examples") {
        const double two = 2.0, three = 3.0;
        const FluxModel hw = single(H(), "w");
        CHECK(flux_eval(hw, 0.5, {&two, 1}, Side::precise) == 1.0);
        const FluxModel one = single(constant(1.0), "sin(w)");
        for (Side s : {Side::left, Side::right, Side::precise, Side::stored})
            CHECK(flux_eval(one, 0.3, {&two, 1}, s) == std::sin(2.0));
        const FluxModel hw2 = single(H(), "w^2");
        CHECK(flux_eval(hw2, 0.5, {&three, 1}, Side::left) == 0.0);
        CHECK(flux_eval(hw2, 0.5, {&three, 1}, Side::right) == 9.0);
        CHECK(hw2.jump_set() == std::vector<double>{0.5});
        CHECK_FALSE(hw2.has_cantor());
    }

    TEST_CASE("construction errors") {
        CHECK_THROWS_AS(FluxModel(std::vector<FluxTerm>{}), PreconditionError);
        CHECK_THROWS_AS(FluxModel({FluxTerm{H(), SmoothFunction::parse("w", 1)},
                                   FluxTerm{H(), SmoothFunction::parse("w0*w1", 2)}}),
                        PreconditionError);
        CHECK_THROWS_AS(FluxModel({FluxTerm{BVFunction::cantor_function(unit, CantorBase(0.0, 0.5)),
                                            SmoothFunction::parse("w", 1)},
                                   FluxTerm{BVFunction::cantor_function(unit, CantorBase(0.25, 0.75)),
                                            SmoothFunction::parse("w", 1)}}),
                        RepresentationError);
    }

    TEST_CASE("pointwise derivatives") {
        const double w = 3.0, two = 2.0;
        const auto d1 = flux_derivatives(single(X(), "w"), 0.3, {&w, 1});
        CHECK(d1.grad_x == 3.0);
        CHECK(d1.grad_w == std::vector<double>{0.3});
        CHECK(d1.psi.bases.empty());

        const auto d2 = flux_derivatives(single(V(), "w"), 0.3, {&w, 1});
        CHECK(d2.grad_x == 0.0);
        REQUIRE(d2.psi.values.size() == 1);
        CHECK(d2.psi.values[0] == 3.0);

        const FluxModel B = single(X() + V(), "w^2");
        const auto d3 = flux_derivatives(B, 0.3, {&two, 1});
        CHECK(d3.grad_x == 4.0);
        CHECK(d3.psi.values[0] == 4.0);
        // The decomposition integrates back to D_x B(., 2).
        const RadonMeasure mu = B.x_derivative({&two, 1});
        for (const auto& phi : probes()) {
            const double direct = integrate_measure(phi.value_integrand(), mu);
            Integrand g = phi.value_integrand();
            const double ac = 4.0 * integrate_lebesgue(g, phi.support().a, phi.support().b);
            const double cantor = 4.0 * integrate_cantor(g, standard, 20);
            CHECK(std::abs(direct - ac - cantor) < 1e-9);
        }

        CHECK_THROWS_AS(flux_derivatives(single(H(), "w"), 0.5, {&w, 1}), DomainError);
    }

    TEST_CASE("bounds hold at random points") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> U(-1.0, 1.0), X01(0.01, 0.99);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t d = 1 + trial % 3;
            const FluxModel B = random_flux_model(rng, d, unit, random_dictionary(rng));
            const std::vector<Bounds> box(d, Bounds{-1.0, 1.0});
            const FluxBounds fb = flux_bounds(B, box);
            for (int probe = 0; probe < 20; ++probe) {
                std::vector<double> w(d), w2(d);
                for (std::size_t i = 0; i < d; ++i) {
                    w[i] = U(rng);
                    w2[i] = U(rng);
                }
                const double x = X01(rng);
                if (std::binary_search(B.jump_set().begin(), B.jump_set().end(), x)) continue;
                const auto der = flux_derivatives(B, x, w);
                CHECK(std::abs(der.grad_x) <= fb.C);
                for (double p : der.psi.values) CHECK(std::abs(p) <= fb.C);
                double norm = 0.0;
                for (double g : der.grad_w) norm += g * g;
                CHECK(std::sqrt(norm) <= fb.D + 1e-12);
                CHECK(measure_total_variation(B.x_derivative(w)) <= fb.C);
                CHECK(lipschitz_slack(B, fb, w, w2) >= -1e-12);
            }
        }
    }
}

TEST_SUITE("chain rule") {
    TEST_CASE("left side examples") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        CHECK(chainrule_lhs(single(H(), "w^2"), BVVector(constant(2.0)), phi) == doctest::Approx(-4.0).epsilon(1e-10));
        CHECK(chainrule_lhs(single(constant(1.0), "w"), BVVector(H()), phi) == doctest::Approx(-1.0).epsilon(1e-10));
    }

    TEST_CASE("term examples") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        const auto r1 = chainrule_terms(single(H(), "w^2"), BVVector(constant(2.0)), phi);
        CHECK(r1.terms[4] == doctest::Approx(4.0).epsilon(1e-14));
        for (int i = 0; i < 4; ++i) CHECK(std::abs(r1.terms[i]) < 1e-14);
        CHECK(std::abs(r1.residual) < 1e-10);
        CHECK(r1.lambda_vacuous);

        // Only the D^c u term survives; it matches the left side quadrature.
        const TestFunction wide = TestFunction::bump(0.5, 0.375);
        const auto r2 = chainrule_terms(single(constant(1.0), "w^2"), BVVector(V()), wide);
        CHECK(r2.terms[0] == 0.0);
        CHECK(r2.terms[1] == 0.0);
        CHECK(std::abs(r2.terms[2]) < 1e-14);
        CHECK(r2.terms[4] == 0.0);
        CHECK(r2.terms[3] > 0.1);
        CHECK(std::abs(r2.residual) <= 1e-6);

        // Cantor coefficient times a step.
        const auto r3 = chainrule_terms(single(V(), "w"), BVVector(H()), phi);
        CHECK(r3.terms[4] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK_FALSE(r3.lambda_vacuous);
        Integrand gh;
        gh.fn = [&](double x) { return x > 0.5 ? phi(x) : 0.0; };
        gh.breaks = {0.5};
        CHECK(std::abs(r3.terms[1] - integrate_cantor(gh, standard, 22)) < 1e-9);
        CHECK(std::abs(r3.residual) <= 1e-6);
        CHECK(verify_chainrule(single(V(), "w"), BVVector(H()), phi) == std::abs(r3.residual));
    }

    TEST_CASE("constant u with smooth K") {
        const auto r = chainrule_terms(single(X() * 2.0 + constant(1.0), "exp(w)"), BVVector(constant(0.7)),
                                       TestFunction::bump(0.4, 0.3));
        CHECK(std::abs(r.residual) <= 1e-9);
    }

    TEST_CASE("star form cases") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        // J_u outside N: the N sum is empty.
        const auto s1 = chainrule_star_parts(single(X(), "w^2"), BVVector(H()), phi);
        CHECK(s1.n_sum == 0.0);
        CHECK(s1.j_sum == doctest::Approx(0.5).epsilon(1e-14));
        // N outside J_u: the average collapses.
        const auto s2 = chainrule_star_parts(single(H(), "w^2"), BVVector(constant(3.0)), phi);
        CHECK(s2.j_sum == 0.0);
        CHECK(s2.n_sum == 9.0);
        // Interaction point.
        const FluxModel B = single(H(), "w^2");
        const BVVector u(H(1.0, 2.0));
        const auto r = chainrule_terms(B, u, phi);
        const auto s3 = chainrule_star_parts(B, u, phi);
        CHECK(r.terms[4] == 4.0);
        CHECK(std::abs(s3.n_sum + s3.j_sum - r.terms[4]) <= 1e-12);
        CHECK(verify_chainrule(B, u, phi) <= 1e-9);
    }

    TEST_CASE("weighted examples") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        const FluxModel B = single(H(), "w");
        const BVVector u(constant(1.0));
        const auto [pair1, rhs1] = weighted_chainrule(B, u, constant(1.0), phi);
        const auto plain = chainrule_terms(B, u, phi);
        CHECK(std::abs(pair1 - plain.total()) < 1e-12);
        CHECK(std::abs(rhs1 - plain.total()) < 1e-12);

        const auto [pair2, rhs2] = weighted_chainrule(B, u, H(), phi);
        CHECK(rhs2 == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(std::abs(pair2 - rhs2) < 1e-10);

        const auto [pair3, rhs3] = weighted_chainrule(B, u, H(2.0, 3.0), phi);
        CHECK(rhs3 == doctest::Approx(2.5).epsilon(1e-14));
        CHECK(std::abs(pair3 - rhs3) < 1e-10);

        CHECK_THROWS_AS(weighted_chainrule(B, u, BVFunction::heaviside(unit, 0.3), phi), PreconditionError);
    }

    TEST_CASE("single-term corollary") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        const auto sq = SmoothFunction::parse("w^2", 1);
        const auto a = corollary_KF(constant(1.0), sq, BVVector(H()), phi);
        CHECK(a.terms[4] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(a.residual) < 1e-10);

        const auto b = corollary_KF(H(), sq, BVVector(X()), phi);
        CHECK(b.terms[4] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(std::abs(b.terms[0]) < 1e-14);
        CHECK(std::abs(b.residual) < 1e-9);

        const auto id = SmoothFunction::parse("w", 1);
        const auto c = corollary_KF(V(), id, BVVector(X()), phi);
        const auto full = chainrule_terms(single(V(), "w"), BVVector(X()), phi);
        CHECK(std::abs(c.total() - full.total()) <= 1e-6);
        CHECK(std::abs(c.residual) <= 1e-6);
        CHECK_FALSE(c.lambda_vacuous);
    }

    TEST_CASE("composite corollary") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        const auto yw = SmoothFunction::parse("y*w", {"y", "w"});
        const BVFunction K = H() + X();
        for (const BVVector& u : {BVVector(V()), BVVector(H(1.0, -1.0)), BVVector(X() + V())}) {
            const double v = corollary_fK(yw, K, u, phi);
            const auto kf = corollary_KF(K, SmoothFunction::parse("w", 1), u, phi);
            CHECK(std::abs(v - kf.total()) <= 1e-12);
        }
        // Constant K: the autonomous chain rule in w.
        const auto f2 = SmoothFunction::parse("y + sin(w)", {"y", "w"});
        const double auton = corollary_fK(f2, constant(2.0), BVVector(X() + V()), phi);
        const auto terms = chainrule_terms(single(constant(1.0), "sin(w)"), BVVector(X() + V()), phi);
        CHECK(std::abs(auton - terms.total()) <= 1e-12);

        const auto g2 = SmoothFunction::parse("sin(y) + w^2", {"y", "w"});
        const double lhs = composite_lhs(g2, K, BVVector(V()), phi);
        CHECK(std::abs(lhs + corollary_fK(g2, K, BVVector(V()), phi)) <= 1e-6);
        CHECK_THROWS_AS(corollary_fK(SmoothFunction::parse("w", 1), K, BVVector(V()), phi), PreconditionError);
    }

    TEST_CASE("level-set comparison examples") {
        const TestFunction phi = TestFunction::bump(0.5, 0.4);
        const PiecewiseConstant zero({0.0, 1.0}, {0.0}, {});
        const auto [l0, r0] = volpert_comparison_pwc(single(H(), "w"), zero, phi);
        CHECK(l0 == 0.0);
        CHECK(r0 == 0.0);

        const PiecewiseConstant steps({0.0, 0.5, 1.0}, {1.0, 2.0}, {1.5});
        const auto [l1, r1] = volpert_comparison_pwc(single(H(), "w"), steps, phi);
        CHECK(r1 == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(std::abs(l1 - r1) <= 1e-8);

        // Smooth B = x t: both sides reduce to int phi u dx, the first term.
        const FluxModel xt = single(X(), "w");
        const PiecewiseConstant s3({0.0, 0.3, 0.55, 1.0}, {-1.0, 0.5, 2.0}, {0.0, 0.0});
        const auto [l2, r2] = volpert_comparison_pwc(xt, s3, phi);
        const auto rep = chainrule_terms(xt, BVVector(s3.to_bv()), phi);
        CHECK(std::abs(l2 - r2) <= 1e-8);
        CHECK(std::abs(r2 - rep.terms[0]) <= 1e-9);

        CHECK_THROWS_AS(volpert_comparison_pwc(single(H(), "w + 1"), steps, phi), PreconditionError);
    }

    TEST_CASE("level-set comparison on random models") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> U(-2.0, 2.0), P(0.05, 0.95);
        for (int trial = 0; trial < 10; ++trial) {
            const auto dict = random_dictionary(rng);
            FluxModel B = random_flux_model(rng, 1, unit, dict);
            std::vector<FluxTerm> terms(B.terms().begin(), B.terms().end());
            // Shift every f_k so that f_k(0) = 0.
            for (auto& t : terms) {
                std::ostringstream shifted;
                shifted << std::setprecision(17) << "(" << t.f.text() << ") - (" << t.f(0.0) << ")";
                t.f = SmoothFunction::parse(shifted.str(), 1);
            }
            B = FluxModel(terms);
            std::vector<double> nodes{0.0, 1.0};
            for (int i = 0; i < 3; ++i) nodes.push_back(P(rng));
            if (!B.jump_set().empty()) nodes.push_back(B.jump_set().front());
            sort_unique(nodes);
            std::vector<double> values, node_values;
            for (std::size_t i = 0; i + 1 < nodes.size(); ++i) values.push_back(U(rng));
            for (std::size_t i = 1; i + 1 < nodes.size(); ++i) node_values.push_back(values[i]);
            const PiecewiseConstant u(nodes, values, node_values);
            const auto phi = random_test_function(rng, unit);
            const auto [left, right] = volpert_comparison_pwc(B, u, phi);
            CHECK(std::abs(left - right) <= 1e-8);
        }
    }

    TEST_CASE("step-function consistency") {
        std::mt19937_64 rng(24);
        for (int trial = 0; trial < 15; ++trial) {
            const auto dict = random_dictionary(rng);
            const std::size_t d = 1 + trial % 3;
            const FluxModel B = random_flux_model(rng, d, unit, dict);
            RandomBVOptions opt;
            opt.max_degree = 0;
            opt.preferred_nodes = B.jump_set();
            std::vector<BVFunction> comps;
            for (std::size_t i = 0; i < d; ++i) comps.push_back(random_bv(rng, opt));
            const BVVector u(comps);
            const auto phi = random_test_function(rng, unit);
            const auto [terms, direct] = step_function_consistency(B, u, phi);
            CHECK(std::abs(terms - direct) <= 1e-8);
        }
        CHECK_THROWS_AS(step_function_consistency(single(H(), "w"), BVVector(X()), TestFunction::bump(0.5, 0.4)),
                        PreconditionError);
    }

    TEST_CASE("representative of u is immaterial") {
        std::mt19937_64 rng(25);
        for (int trial = 0; trial < 10; ++trial) {
            const auto c = random_chain_case(rng, 1);
            const auto left = chainrule_terms(c.B, c.u.with_policy(RepresentativePolicy::left()), c.phis[0]);
            const auto right = chainrule_terms(c.B, c.u.with_policy(RepresentativePolicy::right()), c.phis[0]);
            CHECK(std::abs(left.lhs - right.lhs) <= 1e-8);
            for (int i = 0; i < 5; ++i) CHECK(std::abs(left.terms[i] - right.terms[i]) <= 1e-8);
        }
    }

    TEST_CASE("randomized identity") {
        std::mt19937_64 rng(26);
        const auto start = std::chrono::steady_clock::now();
        int evaluated = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto c = random_chain_case(rng, 5);
            for (const auto& phi : c.phis) {
                const auto r = chainrule_terms(c.B, c.u, phi);
                CHECK(std::abs(r.residual) <= 1e-6 * (1.0 + std::abs(r.lhs)));
                CHECK(std::abs(chainrule_star_form(c.B, c.u, phi) - sum(r.terms)) <= 2e-6);
                ++evaluated;
            }
            if (c.B.terms().size() == 1 && c.u.dim() == 1) {
                const auto& t = c.B.terms()[0];
                const auto kf = corollary_KF(t.K, t.f, c.u, c.phis[0]);
                CHECK(std::abs(kf.total() - chainrule_terms(c.B, c.u, c.phis[0]).total()) <= 1e-6);
            }
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        MESSAGE(evaluated << " evaluations in " << seconds << " s");
    }

    TEST_CASE("weighted identity on random models") {
        std::mt19937_64 rng(27);
        for (int trial = 0; trial < 10; ++trial) {
            const auto c = random_chain_case(rng, 1);
            BVFunction g = X() + constant(1.0);
            for (double x : c.B.jump_set())
                g += BVFunction::heaviside(unit, x, 0.0, std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
            const auto [pairing, rhs] = weighted_chainrule(c.B, c.u, g, c.phis[0]);
            CHECK(std::abs(pairing - rhs) <= 1e-6 * (1.0 + std::abs(pairing)));
        }
    }
}
