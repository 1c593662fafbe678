#include <doctest.h>

#include <cmath>
#include <random>

#include "bvcalc/cantor.hpp"
#include "bvcalc/errors.hpp"
#include "bvcalc/measure.hpp"

using namespace bvcalc;

namespace {

const Interval unit{0.0, 1.0};

Integrand fn(std::function<double(double)> f) {
    Integrand g;
    g.fn = std::move(f);
    return g;
}

// Cantor function of the rational p/q by exact integer digit scan.
double cantor_of_rational(long long p, long long q, int digits) {
    double r = 0.0, scale = 0.5;
    for (int k = 0; k < digits; ++k) {
        p *= 3;
        const long long d = p / q;
        p %= q;
        if (d == 1) return r + scale;
        if (d == 2) r += scale;
        scale *= 0.5;
    }
    return r;
}

// Moments of the standard Cantor measure from its self-similarity.
double cantor_moment(int k) {
    std::vector<double> m{1.0};
    for (int n = 1; n <= k; ++n) {
        double s = 0.0;
        double binom = 1.0;
        for (int j = 0; j < n; ++j) {
            s += binom * std::pow(2.0, n - j) * m[static_cast<std::size_t>(j)];
            binom = binom * (n - j) / (j + 1);
        }
        m.push_back(s / (2.0 * (std::pow(3.0, n) - 1.0)));
    }
    return m.back();
}

// A point drawn from the Cantor measure on [0,1].
double sample_cantor(std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    double x = 0.0, scale = 2.0 / 3.0;
    for (int k = 0; k < 40; ++k) {
        if (coin(rng)) x += scale;
        scale /= 3.0;
    }
    return x;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_SUITE("cantor function") {
    TEST_CASE("endpoints and the middle third") {
        CHECK(cantor_function_eval(0.0) == 0.0);
        CHECK(cantor_function_eval(1.0) == 1.0);
        // double(1/3) sits just below 1/3; the Hoelder exponent log 2 / log 3
        // turns the 1e-17 offset into a ~1e-11 deficit.
        CHECK(std::abs(cantor_function_eval(1.0 / 3.0) - 0.5) < 1e-10);
        CHECK(cantor_function_eval(0.5) == 0.5);
    }

    TEST_CASE("matches an integer digit scan on rationals") {
        CHECK(cantor_function_eval(0.25) == doctest::Approx(cantor_of_rational(1, 4, 40)).epsilon(1e-12));
        CHECK(cantor_function_eval(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        for (long long q : {5LL, 7LL, 10LL, 13LL, 81LL})
            for (long long p = 1; p < q; ++p)
                CHECK(std::abs(cantor_function_eval(static_cast<double>(p) / q) - cantor_of_rational(p, q, 40)) <
                      1e-9);
    }

    TEST_CASE("rejects arguments outside [0,1]") {
        CHECK_THROWS_AS(cantor_function_eval(-0.1), DomainError);
        CHECK_THROWS_AS(cantor_function_eval(1.5), DomainError);
    }

    TEST_CASE("monotone on random pairs") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            double x = u(rng), y = u(rng);
            if (x > y) std::swap(x, y);
            REQUIRE(cantor_function_eval(x) <= cantor_function_eval(y));
        }
    }

    TEST_CASE("rescaled bases") {
        const CantorBase b(0.1, 0.4);
        CHECK(b.cantor_function(0.0) == 0.0);
        CHECK(b.cantor_function(0.5) == 1.0);
        CHECK(b.cantor_function(0.2) == doctest::Approx(0.5));
    }

    TEST_CASE("dictionary compatibility") {
        std::vector<CantorBase> ok{CantorBase(0.1, 0.4), CantorBase(0.6, 0.9), CantorBase(0.1, 0.4)};
        CHECK_NOTHROW(check_cantor_dictionary(ok));
        std::vector<CantorBase> bad{CantorBase(0.0, 1.0), CantorBase(0.1, 0.4)};
        CHECK_THROWS_AS(check_cantor_dictionary(bad), RepresentationError);
    }
}

TEST_SUITE("cantor quadrature") {
    TEST_CASE("moments against the self-similarity recursion") {
        const CantorBase b(0.0, 1.0);
        CHECK(integrate_cantor(fn([](double) { return 1.0; }), b, 3) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(integrate_cantor(fn([](double x) { return x; }), b, 5) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(cantor_moment(2) == doctest::Approx(0.375));
        CHECK(std::abs(integrate_cantor(fn([](double x) { return x * x; }), b, 20) - 0.375) < 1e-10);
        for (int k = 3; k <= 5; ++k)
            CHECK(std::abs(integrate_cantor(fn([k](double x) { return std::pow(x, k); }), b, 20) -
                           cantor_moment(k)) < 1e-9);
    }

    TEST_CASE("convergence bound under refinement") {
        const CantorBase b(0.2, 0.8);
        const std::vector<std::pair<std::function<double(double)>, double>> fs{
            {[](double x) { return std::sin(5.0 * x); }, 5.0},
            {[](double x) { return std::abs(x - 0.5); }, 1.0},
            {[](double x) { return std::exp(x); }, std::exp(0.8)},
        };
        for (const auto& [f, lip] : fs)
            for (int d = 1; d <= 12; ++d) {
                const double a = integrate_cantor(fn(f), b, d);
                const double c = integrate_cantor(fn(f), b, d + 4);
                CHECK(std::abs(a - c) <= lip * 0.6 * std::pow(3.0, -d));
            }
    }

    TEST_CASE("depth rule") {
        CHECK(cantor_depth_for(1e-9, 1.0, 1.0) == 19);
        CHECK(cantor_depth_for(1e-30, 1.0, 1.0) == 24);
        CHECK(cantor_depth_for(10.0, 1.0, 1.0) == 1);
    }

    TEST_CASE("Lebesgue integration of Cantor-function integrands") {
        // int_0^1 C(x) dx = 1/2 and int_0^1 C(x)^2 dx = 1/3 - ... via symmetry and moments.
        Integrand c = fn([](double x) { return cantor_function_eval(x); });
        c.cantor_supports = {unit};
        QuadratureOptions opt;
        opt.tol = 1e-9;
        CHECK(std::abs(integrate_lebesgue(c, 0.0, 1.0, opt) - 0.5) < 1e-9);
        // int C^2 dx = 1 - 2 int x C dC = 1 - 2 * E[X C(X)] under mu_C. With
        // E[X C(X)] by the recursion on cells: symmetric pairs give 5/12.
        Integrand c2 = fn([](double x) { const double v = cantor_function_eval(x); return v * v; });
        c2.cantor_supports = {unit};
        const double ex_c = integrate_cantor(fn([](double x) { return x * cantor_function_eval(x); }), CantorBase(0, 1), 20);
        CHECK(std::abs(integrate_lebesgue(c2, 0.0, 1.0, opt) - (1.0 - 2.0 * ex_c)) < 1e-8);
        // Partial window.
        const double part = integrate_lebesgue(c, 0.2, 0.7, opt);
        const double oracle = simpson([](double x) { return cantor_function_eval(x); }, 0.2, 0.7, 2'000'000);
        CHECK(std::abs(part - oracle) < 1e-6);
    }

    TEST_CASE("adaptive Simpson reports unreachable tolerance") {
        QuadratureOptions opt;
        opt.tol = 1e-14;
        opt.max_depth = 3;
        CHECK_THROWS_AS(adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, opt), QuadratureError);
        CHECK_THROWS_AS(adaptive_simpson([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
    }
}

TEST_SUITE("radon measures") {
    TEST_CASE("integrate_measure examples") {
        CHECK(integrate_measure(fn([](double) { return 1.0; }), RadonMeasure::dirac(unit, 0.5)) == 1.0);
        CHECK(integrate_measure(fn([](double x) { return x; }), RadonMeasure::lebesgue(unit)) ==
              doctest::Approx(0.5).epsilon(1e-12));

        RadonMeasure mu = RadonMeasure::cantor_measure(unit, CantorBase(0, 1)) + RadonMeasure::dirac(unit, 1.0 / 3.0, 2.0);
        const double v = integrate_measure(fn([](double x) { return x; }), mu);
        CHECK(v == doctest::Approx(7.0 / 6.0).epsilon(1e-12));

        std::mt19937_64 rng(11);
        double mc = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) mc += sample_cantor(rng);
        mc = mc / n + 2.0 / 3.0;
        CHECK(std::abs(v - mc) < 5e-3);
    }

    TEST_CASE("atoms use caller-specified values") {
        const RadonMeasure mu = RadonMeasure::dirac(unit, 0.5, 2.0);
        Integrand step = fn([](double x) { return x < 0.5 ? 0.0 : 1.0; });
        step.breaks = {0.5};
        QuadratureOptions opt;
        CHECK(integrate_measure(step, mu, opt, [](double) { return 0.5; }) == 1.0);
    }

    TEST_CASE("linearity") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const RadonMeasure mu = RadonMeasure(unit, PiecewisePolynomial({0.0, 0.3, 1.0}, {Polynomial({1.0, 2.0}), Polynomial({-1.0})}),
                                             {{0.25, 1.5}, {0.8, -0.5}}, {{CantorBase(0.1, 0.4), 2.0}});
        const RadonMeasure nu = RadonMeasure(unit, PiecewisePolynomial::single(0.0, 1.0, Polynomial({0.0, 0.0, 3.0})),
                                             {{0.5, 1.0}}, {{CantorBase(0.6, 0.9), -1.0}});
        const double tol = 1e-9;
        for (int i = 0; i < 20; ++i) {
            const double a = u(rng), b = u(rng), c = u(rng);
            Integrand f = fn([c](double x) { return std::cos(c * x) + x * x; });
            const double lhs = integrate_measure(f, a * mu + b * nu, tol);
            const double rhs = a * integrate_measure(f, mu, tol) + b * integrate_measure(f, nu, tol);
            CHECK(std::abs(lhs - rhs) <= 2.0 * tol * (1.0 + std::abs(a) + std::abs(b)));
        }
    }

    TEST_CASE("total variation examples") {
        CHECK(measure_total_variation(RadonMeasure(unit)) == 0.0);
        CHECK(measure_total_variation(RadonMeasure::dirac(unit, 0.5) - RadonMeasure::dirac(unit, 0.75)) == 2.0);
        const RadonMeasure mu = RadonMeasure::lebesgue(unit, -1.0) + RadonMeasure::cantor_measure(unit, CantorBase(0, 1));
        CHECK(measure_total_variation(mu) == doctest::Approx(2.0));
    }

    TEST_CASE("total variation equals the sup over partitions") {
        // Brute force: partition ]0,1[ into random intervals refined at the
        // sign changes of the density, then split each interval into its
        // atoms, its Cantor part and the Lebesgue remainder.
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            const double r = u(rng);
            const PiecewisePolynomial ac({0.0, 0.45, 1.0}, {Polynomial({r - 0.5, 1.0}), Polynomial({0.2, -1.0})});
            RadonMeasure mu(unit, ac, {{0.2 + 0.1 * r, 1.0 - 2.0 * r}, {0.5, -0.3}},
                            {{CantorBase(0.1, 0.4), 2.0 * r - 1.0}, {CantorBase(0.6, 0.9), 0.7}});
            auto sum_over = [&](std::vector<double> cuts) {
                sort_unique(cuts);
                double s = 0.0;
                for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                    const double lo = cuts[i], hi = cuts[i + 1];
                    double cantor_mass = 0.0;
                    for (const auto& c : mu.cantor())
                        cantor_mass += c.coefficient * (c.base.cantor_function(hi) - c.base.cantor_function(lo));
                    double atom_mass = 0.0;
                    for (const auto& a : mu.atoms())
                        if (a.x >= lo && a.x < hi) atom_mass += std::abs(a.weight);
                    double ac_mass = 0.0;
                    const auto br = ac.breaks();
                    for (std::size_t k = 0; k < ac.piece_count(); ++k) {
                        const double pl = std::max(lo, br[k]), ph = std::min(hi, br[k + 1]);
                        const Polynomial& piece = ac.pieces()[k];
                        if (ph > pl) ac_mass += simpson([&](double x) { return piece(x); }, pl, ph, 200);
                    }
                    s += std::abs(cantor_mass) + atom_mass + std::abs(ac_mass);
                }
                return s;
            };
            const double tv = measure_total_variation(mu);
            std::vector<double> cuts{0.0, 1.0};
            for (int k = 0; k < 30; ++k) cuts.push_back(u(rng));
            CHECK(sum_over(cuts) <= tv + 1e-9);
            for (double z : ac.kinks_of_abs()) cuts.push_back(z);
            for (double z : {0.1, 0.4, 0.6, 0.9}) cuts.push_back(z);
            CHECK(std::abs(sum_over(cuts) - tv) < 1e-6);
        }
    }

    TEST_CASE("variation measure") {
        const RadonMeasure mu(unit, PiecewisePolynomial::single(0.0, 1.0, Polynomial({-0.5, 1.0})), {{0.3, -2.0}},
                              {{CantorBase(0, 1), -1.0}});
        const RadonMeasure v = variation_measure(mu);
        CHECK(v.closed_form());
        CHECK(integrate_measure(fn([](double) { return 1.0; }), v) == doctest::Approx(measure_total_variation(mu)));
        CHECK(v.mass(0.0, 1.0) == doctest::Approx(0.25 + 2.0 + 1.0));
    }

    TEST_CASE("incompatible Cantor bases are rejected") {
        RadonMeasure mu = RadonMeasure::cantor_measure(unit, CantorBase(0, 1));
        CHECK_THROWS_AS(mu.add_cantor(CantorBase(0.1, 0.4), 1.0), RepresentationError);
    }

    TEST_CASE("parts accessors") {
        const RadonMeasure mu(unit, PiecewisePolynomial::single(0.0, 1.0, Polynomial({1.0})), {{0.5, 1.0}},
                              {{CantorBase(0, 1), 1.0}});
        CHECK(measure_total_variation(mu.ac_part()) == doctest::Approx(1.0));
        CHECK(mu.jump_part().atoms().size() == 1);
        CHECK(mu.cantor_part().cantor().size() == 1);
        CHECK(mu.diffuse_part().atoms().empty());
        CHECK(measure_total_variation(mu) == doctest::Approx(3.0));
    }
}

TEST_SUITE("radon-nikodym") {
    TEST_CASE("examples") {
        const CantorBase c(0, 1);
        const auto lam = RadonMeasure::cantor_measure(unit, c);
        CHECK(radon_nikodym_cantor(RadonMeasure::cantor_measure(unit, c, 2.0), lam).on(c) == 2.0);
        CHECK(radon_nikodym_cantor(RadonMeasure(unit), lam).on(c) == 0.0);
    }

    TEST_CASE("two bases and reconstruction") {
        const CantorBase a(0.1, 0.4), b(0.6, 0.9);
        const RadonMeasure nu = RadonMeasure::cantor_measure(unit, a, 3.0) + RadonMeasure::cantor_measure(unit, b, -1.0);
        const RadonMeasure lam = RadonMeasure::cantor_measure(unit, a) + RadonMeasure::cantor_measure(unit, b, 2.0);
        const CantorDensity rho = radon_nikodym_cantor(nu, lam);
        CHECK(rho.on(a) == 3.0);
        CHECK(rho.on(b) == -0.5);
        const RadonMeasure back = rho.reconstruct(lam);
        REQUIRE(back.cantor().size() == nu.cantor().size());
        for (std::size_t i = 0; i < back.cantor().size(); ++i) CHECK(back.cantor()[i].coefficient == nu.cantor()[i].coefficient);

        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 10; ++i) {
            const Polynomial p({u(rng), u(rng), u(rng), u(rng)});
            Integrand f = fn([p](double x) { return p(x); });
            Integrand f_rho = fn([p, rho, a, b](double x) {
                const double d = a.support.contains_closed(x) ? rho.on(a) : (b.support.contains_closed(x) ? rho.on(b) : 0.0);
                return p(x) * d;
            });
            CHECK(integrate_measure(f, nu) == doctest::Approx(integrate_measure(f_rho, lam)).epsilon(1e-12));
        }
    }

    TEST_CASE("absolute continuity violations") {
        const CantorBase a(0.1, 0.4), b(0.6, 0.9);
        CHECK_THROWS_AS(radon_nikodym_cantor(RadonMeasure::cantor_measure(unit, b), RadonMeasure::cantor_measure(unit, a)),
                        PreconditionError);
        CHECK_THROWS_AS(radon_nikodym_cantor(RadonMeasure::dirac(unit, 0.5), RadonMeasure::cantor_measure(unit, a)),
                        PreconditionError);
    }
}

TEST_SUITE("mollification") {
    TEST_CASE("kernel facts") {
        CHECK(mollifier(0.0) == 0.9375);
        CHECK(mollifier_cdf(0.5) == doctest::Approx(0.896484375).epsilon(1e-15));
        CHECK(simpson([](double t) { return mollifier(t); }, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (double t : {-0.7, -0.1, 0.3, 0.9}) {
            const double h = 1e-6;
            CHECK(mollifier_derivative(t) == doctest::Approx((mollifier(t + h) - mollifier(t - h)) / (2 * h)).epsilon(1e-7));
        }
    }

    TEST_CASE("examples") {
        const double eps = 0.05;
        CHECK(mollified_measure_eval(RadonMeasure::dirac(unit, 0.4), eps, 0.4) == doctest::Approx(0.9375 / eps));
        CHECK(std::abs(mollified_measure_eval(RadonMeasure::dirac(unit, 0.4), eps, 0.4 + eps)) < 1e-12);
        CHECK(mollified_measure_eval(RadonMeasure::dirac(unit, 0.4), eps, 0.6) == 0.0);
        CHECK(mollified_measure_eval(RadonMeasure::lebesgue(unit), eps, 0.37) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK_THROWS_AS(mollified_measure_eval(RadonMeasure::lebesgue(unit), eps, 0.01), DomainError);
    }
}
