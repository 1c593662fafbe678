#pragma once

#include <span>
#include <vector>

#include "bvcalc/bv_function.hpp"
#include "bvcalc/measure.hpp"
#include "bvcalc/smooth_function.hpp"

namespace bvcalc {

struct FluxTerm {
    BVFunction K;
    SmoothFunction f;
};

/// B(x, w) = sum_k K_k(x) f_k(w) with K_k closed-form BV and f_k smooth.
///
/// The x-jump set of every B(., w) lies in N, the union of the J_{K_k}. The
/// Cantor parts of D_x B(., w) live on the dictionary of the K_k and are
/// absolutely continuous with respect to
///     lambda = sum_j (sum_k |c_kj|) mu_j,
/// where c_kj is the coefficient of base j in K_k.
class FluxModel {
public:
    FluxModel() = default;
    explicit FluxModel(std::vector<FluxTerm> terms);

    const Interval& domain() const { return terms_.front().K.domain(); }
    std::size_t dim() const { return terms_.front().f.dim(); }
    std::span<const FluxTerm> terms() const { return terms_; }

    /// N: union of the jump sets of the K_k.
    const std::vector<double>& jump_set() const { return jumps_; }
    /// Every interior breakpoint of every K_k.
    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<CantorBase>& cantor_bases() const { return bases_; }
    /// Coefficient of `base` in K_k (0 when absent).
    double cantor_coefficient(std::size_t k, const CantorBase& base) const;
    /// sum_k |c_kj| for base j.
    double lambda_weight(const CantorBase& base) const;
    /// lambda, or an empty measure when no K_k has a Cantor part.
    RadonMeasure lambda() const;
    bool has_cantor() const { return !bases_.empty(); }

    /// Derivative of the smooth part of K_k.
    const PiecewisePolynomial& K_derivative(std::size_t k) const { return dK_[k]; }

    double eval(double x, std::span<const double> w, Side side = Side::stored) const;
    /// D_x B(., w) as a closed-form measure.
    RadonMeasure x_derivative(std::span<const double> w) const;

private:
    std::vector<FluxTerm> terms_;
    std::vector<double> jumps_;
    std::vector<double> breaks_;
    std::vector<CantorBase> bases_;
    std::vector<PiecewisePolynomial> dK_;
};

/// sum_k K_k(x, side) f_k(w).
double flux_eval(const FluxModel& B, double x, std::span<const double> w, Side side = Side::stored);

struct FluxDerivatives {
    double grad_x = 0.0;
    std::vector<double> grad_w;
    /// d D^c_x B(., w) / d lambda per Cantor base.
    CantorDensity psi;
};

/// Pointwise nabla_x B, D_w B and psi. Throws DomainError at points of N.
FluxDerivatives flux_derivatives(const FluxModel& B, double x, std::span<const double> w);

/// Constants controlling B on a compact box of w values.
struct FluxBounds {
    std::vector<Bounds> box;
    /// Lipschitz bound of each f_k over the box.
    std::vector<double> lipschitz;
    /// mu_M = sum_k Lip(f_k) |D K_k|.
    RadonMeasure mu;
    double mu_mass = 0.0;
    /// Bound for |D_x B(., w)|(domain), |nabla_x B| and |psi| over the box.
    double C = 0.0;
    /// Bound for |D_w B| over the box.
    double D = 0.0;
};

FluxBounds flux_bounds(const FluxModel& B, std::span<const Bounds> box);

/// |w - w'| mu_M(domain) - |D_x B(., w) - D_x B(., w')|(domain); nonnegative
/// when the Lipschitz condition in w holds with the constructed mu_M.
double lipschitz_slack(const FluxModel& B, const FluxBounds& bounds, std::span<const double> w,
                       std::span<const double> w2);

}  // namespace bvcalc
