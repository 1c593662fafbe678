#pragma once

#include <span>
#include <string>

#include "bvcalc/interval.hpp"
#include "bvcalc/quadrature.hpp"

namespace bvcalc {

/// Cantor-Lebesgue function on [0,1] by ternary digit scan.
/// Throws DomainError outside [0,1].
double cantor_function_eval(double x);

/// The standard Cantor probability measure pushed affinely onto `support`.
///
/// Two bases are the same base iff their supports coincide; bases used
/// together must be identical or have disjoint closed supports.
struct CantorBase {
    Interval support;

    CantorBase() = default;
    explicit CantorBase(Interval s) : support(s) {}
    CantorBase(double lo, double hi) : support(lo, hi) {}

    /// Rescaled Cantor function: 0 left of the support, 1 right of it.
    double cantor_function(double x) const;
    std::string id() const;

    friend bool operator==(const CantorBase& l, const CantorBase& r) { return l.support == r.support; }
};

/// Throws RepresentationError if two bases overlap without being equal.
void check_cantor_dictionary(std::span<const CantorBase> bases);

/// Depth rule ceil(log3(lip * |support| / tol)), clamped to [1, 24].
int cantor_depth_for(double tol, double lip, double length);

/// Integral of f against the Cantor measure of `base`.
///
/// Averages f over the centres of the 2^depth level-`depth` cells. Every
/// cell is symmetric about its centre, so the rule is exact on affine f.
/// Cells containing a declared break of f are refined further.
double integrate_cantor(const Integrand& f, const CantorBase& base, int depth);

}  // namespace bvcalc
