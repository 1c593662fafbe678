#pragma once

#include <array>
#include <utility>

#include "bvcalc/bv_function.hpp"
#include "bvcalc/flux_model.hpp"
#include "bvcalc/pwc_approx.hpp"

namespace bvcalc {

/// The chain rule for v(x) = B(x, u(x)) tested against phi reads
///     int phi' v dx = -(T1 + T2 + T3 + T4 + T5)
/// with
///     T1 = int phi nabla_x B(x, u) dx
///     T2 = int phi psi(x, u) d lambda
///     T3 = int phi D_w B(x, u) . nabla u dx
///     T4 = int phi D_w B(x, u) . d D^c u
///     T5 = sum over N and J_u of phi(x) [B(x+, u(x+)) - B(x-, u(x-))].
/// Reports carry the T_i, so residual = lhs + sum T_i vanishes.
struct ChainRuleReport {
    double lhs = 0.0;
    std::array<double, 5> terms{};
    double residual = 0.0;
    /// True when B has no Cantor part, so T2 vanishes identically.
    bool lambda_vacuous = true;

    double total() const { return terms[0] + terms[1] + terms[2] + terms[3] + terms[4]; }
};

/// int phi' B(x, u(x)) dx, subdivided at N, J_u and every breakpoint.
double chainrule_lhs(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol = 1e-9);

ChainRuleReport chainrule_terms(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol = 1e-9);

/// The same identity with the jump sum split into an N part (one-sided
/// values of B averaged over u(x+) and u(x-)) and a J_u part (differences
/// of the precise representative B*).
struct StarForm {
    double diffuse = 0.0;
    double n_sum = 0.0;
    double j_sum = 0.0;

    double total() const { return diffuse + n_sum + j_sum; }
};

StarForm chainrule_star_parts(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol = 1e-9);
double chainrule_star_form(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol = 1e-9);

/// int phi g* d(B(x, u(x)))_x two ways: through the product rule for g v
/// (first) and through the g-weighted chain-rule terms (second). Requires
/// J_g inside N.
std::pair<double, double> weighted_chainrule(const FluxModel& B, const BVVector& u, const BVFunction& g,
                                             const TestFunction& phi, double tol = 1e-9);

/// B(x, w) = K(x) f(w) with the terms grouped as
///     T1 + T2 = int phi f(u) dD^d K (ac and Cantor parts of DK),
///     T3, T4 as in the general rule with D_w B = K grad f,
///     T5 = sum over J_K of phi (f(u))* [K] + sum over J_u of phi K* [f(u)].
ChainRuleReport corollary_KF(const BVFunction& K, const SmoothFunction& f, const BVVector& u,
                             const TestFunction& phi, double tol = 1e-9);

/// B(x, w) = f2(K(x), w) with f2 a function of (y, w): returns
///     int phi f_y dD~K + int phi f_w . dD~u + sum over J_u and J_K of
///     phi [f2(K(x+), u(x+)) - f2(K(x-), u(x-))],
/// D~ the diffuse part, so that composite_lhs + value = 0.
double corollary_fK(const SmoothFunction& f2, const BVFunction& K, const BVVector& u, const TestFunction& phi,
                    double tol = 1e-9);

/// int phi' f2(K(x), u(x)) dx.
double composite_lhs(const SmoothFunction& f2, const BVFunction& K, const BVVector& u, const TestFunction& phi,
                     double tol = 1e-9);

/// For scalar u piecewise constant and B(., 0) = 0: the level-set double
/// integral int dt int sgn(t) chi*_{Omega_t} phi dD_x(D_t B)(., t) (first)
/// and sum_i int phi chi*_{[a_i, a_i+1]} dD_x B(., v_i) (second).
std::pair<double, double> volpert_comparison_pwc(const FluxModel& B, const PiecewiseConstant& u,
                                                 const TestFunction& phi, double tol = 1e-9);

/// For u piecewise constant: T1 + T2 + T5 from chainrule_terms (first) and
/// the same quantity assembled cell by cell with frozen values v_i (second).
std::pair<double, double> step_function_consistency(const FluxModel& B, const BVVector& u,
                                                    const TestFunction& phi, double tol = 1e-9);

/// |lhs + sum T_i|.
double verify_chainrule(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol = 1e-9);

}  // namespace bvcalc
