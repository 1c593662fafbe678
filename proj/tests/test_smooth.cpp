#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "bvcalc/errors.hpp"
#include "bvcalc/smooth_function.hpp"

using namespace bvcalc;

namespace {

// Random expression over w0..w{d-1}; divisions only by 2 + positive terms.
std::string random_expression(std::mt19937_64& rng, std::size_t d, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_int_distribution<std::size_t> var(0, d - 1);
    auto sub = [&] { return random_expression(rng, d, depth - 1); };
    switch (pick(rng)) {
        case 0: return std::to_string(coef(rng));
        case 1: return "w" + std::to_string(var(rng));
        case 2: return "(" + sub() + " + " + sub() + ")";
        case 3: return "(" + sub() + " - " + sub() + ")";
        case 4: return "(" + sub() + ") * (" + sub() + ")";
        case 5: return "(" + sub() + ") / (2 + (" + sub() + ")^2)";
        case 6: return "(" + sub() + ")^" + std::to_string(std::uniform_int_distribution<int>(1, 3)(rng));
        case 7: {
            static const char* fns[] = {"sin", "cos", "tanh", "atan"};
            return std::string(fns[std::uniform_int_distribution<int>(0, 3)(rng)]) + "(" + sub() + ")";
        }
        default: return "exp(0.3 * (" + sub() + "))";
    }
}

}  // namespace

TEST_SUITE("smooth functions") {
    TEST_CASE("parsing and evaluation") {
        const auto f = SmoothFunction::parse("2*w^3 - sin(w) / 4 + pi", 1);
        CHECK(f(1.5) == doctest::Approx(2 * 3.375 - std::sin(1.5) / 4 + M_PI).epsilon(1e-15));
        CHECK(f.derivative(1.5) == doctest::Approx(6 * 2.25 - std::cos(1.5) / 4).epsilon(1e-15));
        const auto g = SmoothFunction::parse("u^2", 1);
        CHECK(g(3.0) == 9.0);
        const auto h = SmoothFunction::parse("w0*w1 + exp(w2)", 3);
        const double w[3] = {2.0, 3.0, 0.0};
        CHECK(h(w) == 7.0);
        CHECK(h.gradient(w) == std::vector<double>{3.0, 2.0, 1.0});
        const auto k = SmoothFunction::parse("sin(y) + w^2", {"y", "w"});
        const double yw[2] = {0.0, 2.0};
        CHECK(k(yw) == 4.0);
        CHECK(k.partial(yw, 0) == 1.0);
        CHECK(SmoothFunction::parse("w^-2", 1)(2.0) == 0.25);
        CHECK(SmoothFunction::parse("-w^2", 1)(3.0) == -9.0);
        CHECK(SmoothFunction::parse("1.5e-1*w", 1)(2.0) == doctest::Approx(0.3));
    }

    TEST_CASE("parse errors name the problem") {
        CHECK_THROWS_WITH_AS(SmoothFunction::parse("w + ", 1), doctest::Contains("unexpected end"), PreconditionError);
        CHECK_THROWS_WITH_AS(SmoothFunction::parse("sqrt(w)", 1), doctest::Contains("unknown name 'sqrt'"),
                             PreconditionError);
        CHECK_THROWS_WITH_AS(SmoothFunction::parse("w^0.5", 1), doctest::Contains("integer"), PreconditionError);
        CHECK_THROWS_WITH_AS(SmoothFunction::parse("w", 2), doctest::Contains("unknown name 'w'"), PreconditionError);
        CHECK_THROWS_AS(SmoothFunction::parse("(w", 1), PreconditionError);
        CHECK_THROWS_AS(SmoothFunction::parse("w)", 1), PreconditionError);
    }

    TEST_CASE("gradient agrees with finite differences") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(-1.5, 1.5);
        std::size_t checked = 0, expected = 0;
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t d = 1 + trial % 3;
            const auto f = SmoothFunction::parse(random_expression(rng, d, 4), d);
            expected += 5 * d;
            for (int probe = 0; probe < 5; ++probe) {
                std::vector<double> w(d);
                for (double& x : w) x = U(rng);
                const auto g = f.gradient(w);
                for (std::size_t k = 0; k < d; ++k) {
                    const double h = 1e-6;
                    auto wp = w, wm = w;
                    wp[k] += h;
                    wm[k] -= h;
                    const double fd = (f(wp) - f(wm)) / (2 * h);
                    const double scale = std::max({1.0, std::abs(g[k]), std::abs(f(w))});
                    CHECK(std::abs(fd - g[k]) <= 1e-5 * scale);
                    ++checked;
                }
            }
        }
        CHECK(checked == expected);
    }

    TEST_CASE("enclosures contain sampled values") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.0, 1.0);
        for (int trial = 0; trial < 150; ++trial) {
            const std::size_t d = 1 + trial % 3;
            const auto f = SmoothFunction::parse(random_expression(rng, d, 4), d);
            std::vector<Bounds> box(d);
            for (auto& b : box) {
                const double c = U(rng), r = 0.5 * W(rng);
                b = {c - r, c + r};
            }
            const Bounds range = f.range(box);
            const double lip = f.lipschitz(box);
            for (int probe = 0; probe < 20; ++probe) {
                std::vector<double> w(d);
                for (std::size_t i = 0; i < d; ++i) w[i] = box[i].lo + W(rng) * (box[i].hi - box[i].lo);
                CHECK(range.contains(f(w)));
                const auto g = f.gradient(w);
                double norm = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    CHECK(f.partial_range(box, k).contains(g[k]));
                    norm += g[k] * g[k];
                }
                CHECK(std::sqrt(norm) <= lip);
            }
        }
    }

    TEST_CASE("sine enclosure over critical points") {
        const auto f = SmoothFunction::parse("sin(w)", 1);
        const Bounds b[1] = {{1.0, 2.0}};
        const Bounds r = f.range(b);
        CHECK(r.hi >= 1.0);
        CHECK(r.lo <= std::sin(1.0));
        CHECK(r.lo > 0.8);
        const Bounds c[1] = {{-0.1, 0.1}};
        CHECK(SmoothFunction::parse("cos(w)", 1).range(c).hi >= 1.0);
        CHECK_THROWS_AS(SmoothFunction::parse("1 / w", 1).range(c), RepresentationError);
    }
}
