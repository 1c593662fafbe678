#pragma once

#include <span>

#include "bvcalc/bv_function.hpp"
#include "bvcalc/measure.hpp"

namespace bvcalc {

/// Du = nabla u dx + D^c u + sum over J_u of (u(x+) - u(x-)) delta_x.
RadonMeasure derivative(const BVFunction& u);

/// |Du|(domain).
double total_variation(const BVFunction& u);

/// sum |u(t_{i+1}) - u(t_i)| with the stored representative.
double pointwise_variation(const BVFunction& u, std::span<const double> partition);

/// (u * phi_eps)(x) with the fixed quartic kernel.
double mollify(const BVFunction& u, double eps, double x, double tol = 1e-10);

/// v* Dw + w* Dv assembled part by part. Throws RepresentationError when
/// v and w carry Cantor parts on the same base.
RadonMeasure leibniz_product(const BVFunction& v, const BVFunction& w);

/// Pointwise product v w as an integrand (for weak-form checks).
Integrand product_integrand(const BVFunction& v, const BVFunction& w);

/// int g d|Du|.
double coarea_lhs(const Integrand& g, const BVFunction& u, double tol = 1e-9);

/// int dt sum over {x : t between u(x-) and u(x+)} of g(x).
///
/// The domain is cut into segments on which u is continuous and monotone;
/// each segment is integrated in t through the inverse of u, jumps
/// contribute g(x) |u(x+) - u(x-)|. Levels of flat pieces are skipped as a
/// null set. Throws RepresentationError when a segment mixes an increasing
/// polynomial with a decreasing Cantor summand (or vice versa).
double coarea_rhs(const Integrand& g, const BVFunction& u, double tol = 1e-9);

/// int u phi' dx + int phi dDu; zero up to quadrature error.
double integration_by_parts_residual(const BVFunction& u, const TestFunction& phi, double tol = 1e-9);

}  // namespace bvcalc
