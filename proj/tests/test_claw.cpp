#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bvcalc/claw.hpp"
#include "bvcalc/errors.hpp"

using namespace bvcalc;

namespace {

const Interval sym{-1.0, 1.0};

FluxModel single(BVFunction K, const std::string& f) {
    return FluxModel({FluxTerm{std::move(K), SmoothFunction::parse(f, 1)}});
}

// (1 + H_0) w on ]-1, 1[.
ScalarFlux two_level(Bounds range = {-4.0, 4.0}) {
    return ScalarFlux(single(BVFunction::heaviside(sym, 0.0, 1.0, 2.0), "w"), range);
}

ScalarFlux burgers() { return ScalarFlux(single(BVFunction::constant(sym, 1.0), "0.5*w^2"), {0.0, 1.0}); }

BVFunction riemann(double left, double right, double x0 = 0.0) {
    return BVFunction::heaviside(sym, x0, left, right);
}

SpaceTimeTest st(double xc, double xr, double tc, double tr) {
    return {TestFunction::bump(xc, xr), TestFunction::bump(tc, tr)};
}

}  // namespace

TEST_SUITE("flux inversion") {
    TEST_CASE("c_alpha examples") {
        const ScalarFlux f = two_level();
        CHECK(c_alpha(f, -0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(c_alpha(f, 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(c_alpha(f, 0.0, 1.0, Side::left) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(c_alpha(f, 0.0, 1.0, Side::right) == doctest::Approx(0.5).epsilon(1e-13));

        const ScalarFlux id(single(BVFunction::constant(sym, 1.0), "w"), {-3.0, 3.0});
        for (double a : {-2.5, -1.0, 0.0, 0.3, 2.9}) CHECK(std::abs(c_alpha(id, 0.2, a) - a) < 1e-13);

        const Interval wide{0.0, 2.0};
        const ScalarFlux cubic(FluxModel({FluxTerm{BVFunction::polynomial(wide, Polynomial({1.0, 1.0})),
                                                   SmoothFunction::parse("w^3", 1)}}),
                               {0.5, 3.0});
        CHECK(std::abs(c_alpha(cubic, 1.0, 16.0) - std::cbrt(16.0 / 2.0)) < 1e-13);

        CHECK_THROWS_AS(c_alpha(f, 0.5, 9.0), RangeError);
    }

    TEST_CASE("monotonicity certificate") {
        CHECK_THROWS_AS(ScalarFlux(single(BVFunction::constant(sym, 1.0), "w^2"), {-1.0, 1.0}), PreconditionError);
        CHECK_THROWS_AS(ScalarFlux(single(BVFunction::constant(sym, 1.0), "w0*w1"), {0.0, 1.0}),
                        PreconditionError);
        const ScalarFlux dec(single(BVFunction::heaviside(sym, 0.0, 1.0, 3.0), "-w"), {-1.0, 1.0});
        CHECK(dec.orientation() == -1);
        CHECK(dec.bound() == doctest::Approx(3.0));
        CHECK(burgers().orientation() == 1);
    }

    TEST_CASE("Rankine-Hugoniot pairs") {
        const ScalarFlux f = two_level();
        CHECK(is_rankine_hugoniot(f, 0.0, 1.0, 0.5));
        CHECK_FALSE(is_rankine_hugoniot(f, 0.0, 1.0, 1.0));
        const ScalarFlux smooth(single(BVFunction::polynomial(sym, Polynomial({2.0, 0.5})), "w"), {-1.0, 1.0});
        for (double u : {-0.7, 0.0, 0.4}) CHECK(is_rankine_hugoniot(smooth, 0.3, u, u));
    }
}

TEST_SUITE("entropy pairs") {
    TEST_CASE("classical Kruzkov pair") {
        const ScalarFlux id(single(BVFunction::constant(sym, 1.0), "w"), {-2.0, 2.0});
        const auto p = adapted_entropy_pair(id, 0.0);
        CHECK(p.eta(0.3, -1.5) == 1.5);
        CHECK(p.q(0.3, -1.5) == 1.5);
        CHECK(p.q(0.3, 0.0) == 0.0);
        const auto v = validate_pair(id, p, 0.0);
        CHECK(v.compatibility_error <= 1e-8);
        CHECK(v.convexity_defect >= -1e-14);
    }

    TEST_CASE("adapted pair on the two-level flux") {
        const ScalarFlux f = two_level();
        const auto p = adapted_entropy_pair(f, 1.0);
        // (1, 1/2) is in A_0 and sits on the kink on both sides.
        CHECK(p.q(0.0, 0.5, Side::right) - p.q(0.0, 1.0, Side::left) == 0.0);
        for (double alpha : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.5}) {
            const auto v = validate_pair(f, adapted_entropy_pair(f, alpha), alpha);
            CHECK(v.compatibility_error <= 1e-8);
            CHECK(v.interface_error <= 1e-10);
            CHECK(v.rh_pairs > 0);
            CHECK(v.side_violations == 0);
        }
        CHECK_THROWS_AS(adapted_entropy_pair(f, 7.0), RangeError);
    }

    TEST_CASE("convex pairs satisfy the compatibility identity") {
        const ScalarFlux f(single(BVFunction::polynomial(sym, Polynomial({1.5, 0.5})), "w + 0.2*w^3"), {-1.0, 1.0});
        for (const char* e : {"w^2", "exp(w)", "w^4 + w"}) {
            const auto v = validate_pair(f, convex_entropy_pair(f, SmoothFunction::parse(e, 1)), std::nan(""));
            CHECK(v.compatibility_error <= 1e-8);
            CHECK(v.convexity_defect >= 0.0);
        }
    }
}

TEST_SUITE("affine entropy approximation") {
    TEST_CASE("quadratic entropy, identity flux") {
        const ScalarFlux id(single(BVFunction::constant(sym, 1.0), "w"), {-1.0, 1.0});
        const auto pair = convex_entropy_pair(id, SmoothFunction::parse("w^2", 1));
        for (int N : {4, 16, 64}) {
            const auto A = affine_entropy_approx(pair, id, N, 0.2);
            CHECK(A.m == -N);
            CHECK(A.n == N);
            for (std::size_t i = 0; i < A.delta.size(); ++i)
                CHECK(std::abs(A.delta[i] - (A.c[i + 1] + A.c[i])) < 1e-12);
            for (double b : A.b_i) CHECK(std::abs(b - A.C / N) < 1e-12);
            for (std::size_t i = 0; i < A.c.size(); ++i) CHECK(std::abs(A.eta_N(A.c[i]) - A.c[i] * A.c[i]) <= 1e-10);
            for (std::size_t i = 0; i + 1 < A.c.size(); ++i) {
                const double mid = 0.5 * (A.c[i] + A.c[i + 1]);
                CHECK(A.eta_N(mid) <= 0.5 * (A.eta_N(A.c[i]) + A.eta_N(A.c[i + 1])) + 1e-14);
            }
        }
    }

    TEST_CASE("a kink on its own node") {
        const ScalarFlux id(single(BVFunction::constant(sym, 1.0), "w"), {-1.0, 1.0});
        const int N = 8;
        const double a0 = 3.0 / N;
        const auto A = affine_entropy_approx(adapted_entropy_pair(id, a0), id, N, -0.4);
        for (std::size_t i = 0; i < A.b_i.size(); ++i) {
            const bool at_kink = std::abs(A.c[i + 1] - a0) < 1e-12;
            CHECK(std::abs(A.b_i[i] - (at_kink ? 1.0 : 0.0)) < 1e-12);
        }
        CHECK(std::abs(A.b) < 1e-12);
    }

    TEST_CASE("coefficients are nonnegative and interpolate") {
        const std::vector<ScalarFlux> fluxes = {
            two_level({-2.0, 2.0}),
            ScalarFlux(single(BVFunction::polynomial(sym, Polynomial({2.0, 0.7})) + BVFunction::heaviside(sym, 0.25),
                              "w + 0.3*w^3"),
                       {-1.0, 1.5}),
            ScalarFlux(single(BVFunction::heaviside(sym, -0.5, 1.0, 2.0), "-w - atan(w)"), {-1.0, 1.0})};
        for (const auto& f : fluxes) {
            std::vector<EntropyFluxPair> pairs;
            for (const char* e : {"w^2", "exp(w)", "w^4 - w", "(w - 0.3)^2 + w^6"})
                pairs.push_back(convex_entropy_pair(f, SmoothFunction::parse(e, 1)));
            pairs.push_back(adapted_entropy_pair(f, 0.1));
            for (const auto& p : pairs)
                for (int N : {4, 16, 64})
                    for (double x : {-0.9, -0.5, -0.2, 0.0, 0.25, 0.6, 0.95})
                        for (Side side : {Side::left, Side::right}) {
                            const auto A = affine_entropy_approx(p, f, N, x, side);
                            for (double b : A.b_i) CHECK(b >= 0.0);
                            const auto s = p.section(x, side);
                            for (double c : A.c) CHECK(std::abs(A.eta_N(c) - s.eta(c)) <= 1e-10);
                        }
        }
    }
}

TEST_SUITE("finite volumes") {
    TEST_CASE("Burgers shock against the exact Riemann solution") {
        const int cells = 400;
        const auto field = solve_claw(burgers(), riemann(1.0, 0.0), 0.5, cells, 0.45);
        CHECK(field.times.back() == 0.5);
        double l1 = 0.0;
        const auto& u = field.states.back();
        for (int i = 0; i < cells; ++i) {
            const double lo = field.interface(i), hi = field.interface(i + 1), s = 0.25;
            const double exact = std::clamp((s - lo) / field.dx, 0.0, 1.0);
            l1 += std::abs(u[static_cast<std::size_t>(i)] - exact) * field.dx;
        }
        CHECK(l1 <= 2.0 * field.dx);
        for (double d : field.mass_drift) CHECK(d <= 1e-12);
    }

    TEST_CASE("stationary profiles") {
        const ScalarFlux f = two_level();
        const auto steady = solve_claw(f, riemann(1.0, 0.5), 1.0, 64);
        for (const auto& row : steady.states) CHECK(row == steady.states.front());

        // Inflow of 1 fills the right half with the A_x partner 1/2.
        const auto fill = solve_claw(f, riemann(1.0, 0.0), 3.0, 64);
        for (int i = 0; i < 64; ++i)
            CHECK(std::abs(fill.states.back()[static_cast<std::size_t>(i)] - (i < 32 ? 1.0 : 0.5)) <= 1e-10);

        // B(., 1) = 0 on both sides.
        const ScalarFlux g(single(BVFunction::heaviside(sym, 0.0, 1.0, 3.0), "w - 1"), {0.0, 2.0});
        const auto flat = solve_claw(g, BVFunction::constant(sym, 1.0), 1.0, 40);
        for (const auto& row : flat.states) CHECK(row == flat.states.front());
    }

    TEST_CASE("preconditions") {
        CHECK_THROWS_AS(solve_claw(burgers(), riemann(1.0, 0.0), 0.5, 100, 0.6), PreconditionError);
        CHECK_THROWS_AS(solve_claw(burgers(), riemann(1.0, 0.0), 0.5, 3), PreconditionError);
        CHECK_THROWS_AS(solve_claw(two_level(), riemann(1.0, 0.5), 0.5, 7), PreconditionError);
        CHECK_THROWS_AS(solve_claw(burgers(), riemann(2.0, 0.0), 0.5, 10), RangeError);
        // Inflow too large to be carried by the right half.
        CHECK_THROWS_AS(solve_claw(ScalarFlux(single(BVFunction::heaviside(sym, 0.0, 2.0, 1.0), "w"), {-1.0, 1.0}),
                                   riemann(1.0, 0.0), 0.5, 20),
                        RangeError);
    }

    TEST_CASE("field export") {
        const auto field = solve_claw(burgers(), riemann(1.0, 0.0), 0.05, 8);
        std::ostringstream out;
        write_field_csv(out, field);
        const std::string s = out.str();
        CHECK(s.rfind("x,t,u\n", 0) == 0);
        CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == 1 + 8 * field.states.size());
    }
}

TEST_SUITE("entropy residual") {
    TEST_CASE("constant solution") {
        const ScalarFlux f = burgers();
        const auto field = solve_claw(f, BVFunction::constant(sym, 0.4), 0.5, 50);
        CHECK(std::abs(entropy_residual(field, f, adapted_entropy_pair(f, 0.2), st(0.0, 0.5, 0.25, 0.2))) <= 1e-15);
    }

    TEST_CASE("negative test functions are rejected") {
        const ScalarFlux f = burgers();
        const auto field = solve_claw(f, BVFunction::constant(sym, 0.4), 0.1, 10);
        const SpaceTimeTest bad{TestFunction::bump_times(0.0, 0.5, Polynomial({0.0, 1.0})), TestFunction::bump(0.05, 0.04)};
        CHECK_THROWS_AS(entropy_residual(field, f, adapted_entropy_pair(f, 0.2), bad), PreconditionError);
    }

    TEST_CASE("entropic runs and the expansion shock") {
        const ScalarFlux f = burgers();
        const int cells = 400;
        const auto shock = solve_claw(f, riemann(1.0, 0.0), 0.5, cells);
        const auto fan = solve_claw(f, riemann(0.0, 1.0), 0.5, cells);
        const auto expansion = sample_field(
            -1.0, 1.0, cells, shock.times, [](double x, double t) { return x < 0.5 * t ? 0.0 : 1.0; },
            [](double t) { return std::vector<double>{0.5 * t}; });
        const SpaceTimeTest phi = st(0.1, 0.6, 0.25, 0.2);
        double worst_entropic = -1e300, worst_expansion = -1e300;
        for (double alpha : adapted_levels(f, 9)) {
            const auto p = adapted_entropy_pair(f, alpha);
            worst_entropic = std::max({worst_entropic, entropy_residual(shock, f, p, phi), entropy_residual(fan, f, p, phi)});
            worst_expansion = std::max(worst_expansion, entropy_residual(expansion, f, p, phi));
        }
        MESSAGE("entropic " << worst_entropic << ", expansion " << worst_expansion);
        CHECK(worst_entropic <= 1e-3);
        CHECK(worst_expansion > 1e-2);
    }
}

TEST_SUITE("entropy residual") {
    TEST_CASE("manufactured solution with jumps only on the flux jump") {
        const ScalarFlux f = two_level();
        // u = g(x - t) on the left, g((x - 2t) / 2) / 2 on the right.
        auto g = [](double s) { return 1.0 + 0.5 * std::sin(3.0 * s); };
        auto u = [&](double x, double t) { return x < 0.0 ? g(x - t) : 0.5 * g(0.5 * (x - 2.0 * t)); };
        std::vector<double> times;
        for (int n = 0; n <= 400; ++n) times.push_back(0.5 * n / 400.0);
        const auto field = sample_field(-1.0, 1.0, 400, times, u, [](double) { return std::vector<double>{0.0}; });
        double worst = -1e300;
        for (int k = 0; k < 10; ++k) {
            const SpaceTimeTest phi = st(-0.4 + 0.09 * k, 0.3 + 0.03 * k, 0.25, 0.15 + 0.008 * k);
            for (double alpha : adapted_levels(f, 7))
                worst = std::max(worst, entropy_residual(field, f, adapted_entropy_pair(f, alpha), phi));
        }
        MESSAGE("worst residual " << worst);
        CHECK(worst <= 1e-3);
    }

    TEST_CASE("adapted levels and affine pairs flag the same runs") {
        const ScalarFlux f = burgers();
        const int cells = 200;
        const auto shock = solve_claw(f, riemann(1.0, 0.0), 0.5, cells);
        const auto fan = solve_claw(f, riemann(0.0, 1.0), 0.5, cells);
        const auto expansion = sample_field(
            -1.0, 1.0, cells, shock.times, [](double x, double t) { return x < 0.5 * t ? 0.0 : 1.0; },
            [](double t) { return std::vector<double>{0.5 * t}; });
        const SpaceTimeTest phi = st(0.1, 0.6, 0.25, 0.2);
        const double tol = 1e-3;
        std::vector<EntropyFluxPair> affine;
        for (const char* e : {"w^2", "exp(w)", "w^4 + w"})
            affine.push_back(affine_entropy_pair(convex_entropy_pair(f, SmoothFunction::parse(e, 1)), f, 16));
        for (const ClawField* run : {&shock, &fan, &expansion}) {
            bool adapted_ok = true, affine_ok = true;
            for (double alpha : adapted_levels(f, 9))
                adapted_ok = adapted_ok && entropy_residual(*run, f, adapted_entropy_pair(f, alpha), phi) <= tol;
            for (const auto& p : affine) affine_ok = affine_ok && entropy_residual(*run, f, p, phi) <= tol;
            CHECK(adapted_ok == affine_ok);
            CHECK(adapted_ok == (run != &expansion));
        }
    }
}
