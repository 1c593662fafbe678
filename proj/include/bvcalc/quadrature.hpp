#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "bvcalc/interval.hpp"

namespace bvcalc {

/// A bounded real function together with what quadrature needs to know
/// about where it is rough.
struct Integrand {
    std::function<double(double)> fn;
    /// Points where fn may jump or kink. Quadrature always subdivides here.
    std::vector<double> breaks;
    /// Supports of Cantor bases whose Cantor functions enter fn. There fn is
    /// only Hoelder continuous and is integrated through the gap structure.
    std::vector<Interval> cantor_supports;
    /// fn vanishes outside [support_lo, support_hi].
    double support_lo = -std::numeric_limits<double>::infinity();
    double support_hi = std::numeric_limits<double>::infinity();

    double operator()(double x) const { return fn(x); }
};

/// Pointwise product; rough points and supports combine.
Integrand product(const Integrand& f, const Integrand& g);
/// Pointwise product with a function that needs no subdivision hints.
Integrand product(const Integrand& f, std::function<double(double)> g);

struct QuadratureOptions {
    double tol = 1e-9;                        ///< absolute error target
    int max_depth = 48;                       ///< adaptive bisection limit
    long long max_evaluations = 200'000'000;  ///< hard cap on function calls
    int cantor_depth = 0;                     ///< 0: derive from tol and lipschitz
    double lipschitz = 1.0;                   ///< Lipschitz scale of Cantor-paired integrands
};

/// Adaptive Simpson on [lo, hi]. fn must be smooth inside ]lo, hi[.
/// Throws QuadratureError when the tolerance cannot be met.
double adaptive_simpson(const std::function<double(double)>& fn, double lo, double hi,
                        const QuadratureOptions& opt = {});

/// Lebesgue integral of f over [lo, hi]: subdivides at every declared break
/// and integrates Cantor supports through their ternary gap decomposition.
double integrate_lebesgue(const Integrand& f, double lo, double hi, const QuadratureOptions& opt = {});

/// Three-point Gauss-Legendre on [lo, hi].
double gauss3(const std::function<double(double)>& fn, double lo, double hi);

}  // namespace bvcalc
