#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "bvcalc/flux_model.hpp"

namespace bvcalc {

/// Scalar flux B(x, w) certified strictly monotone in w on a working range.
class ScalarFlux {
public:
    ScalarFlux() = default;
    /// Samples the sign of dB/dw at `samples` points of the range for every
    /// cell of a dense x-grid and on both sides of every breakpoint of K.
    ScalarFlux(FluxModel B, Bounds working_range, int samples = 64);

    const FluxModel& model() const { return B_; }
    const Interval& domain() const { return B_.domain(); }
    const Bounds& range() const { return range_; }
    /// +1 when B(x, .) increases, -1 when it decreases.
    int orientation() const { return orientation_; }
    /// max |B| over the domain times the working range.
    double bound() const { return bound_; }
    /// max |dB/dw| over the same set, sampled.
    double max_speed() const { return speed_; }

    double operator()(double x, double w, Side side = Side::stored) const;
    double dw(double x, double w, Side side = Side::stored) const;
    /// Values of B(x, .) at the ends of the working range, sorted.
    Bounds attained(double x, Side side = Side::stored) const;

private:
    FluxModel B_;
    Bounds range_;
    int orientation_ = 1;
    double bound_ = 0.0;
    double speed_ = 0.0;
};

/// The root c of B(x_side, c) = alpha in the working range, by bisection.
/// Throws RangeError when alpha is not attained there.
double c_alpha(const ScalarFlux& flux, double x, double alpha, Side side = Side::stored, double tol = 1e-14);

/// |B(x-, u_minus) - B(x+, u_plus)| <= tol.
bool is_rankine_hugoniot(const ScalarFlux& flux, double x, double u_minus, double u_plus, double tol = 1e-12);

/// (sgn)* : the precise representative, 0 at the origin.
inline double sgn_star(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// eta(x, .), eta_u(x, .) and q(x, .) frozen at one point and side.
struct EntropySection {
    std::function<double(double)> eta;
    std::function<double(double)> eta_u;
    std::function<double(double)> q;
};

/// Entropy-flux pair tied to one scalar flux. Sections are requested once
/// per spatial node and reused across time slices.
struct EntropyFluxPair {
    std::function<EntropySection(double x, Side side)> section;
    std::string label;

    double eta(double x, double u, Side side = Side::stored) const { return section(x, side).eta(u); }
    double q(double x, double u, Side side = Side::stored) const { return section(x, side).q(u); }
};

/// `count` equally spaced levels strictly inside the set of alpha attained
/// at every x, i.e. the levels admitting an adapted entropy.
std::vector<double> adapted_levels(const ScalarFlux& flux, int count);

/// eta = |u - c_alpha(x)|, q = (B(x, u) - alpha) (sgn(u - c_alpha(x)))*.
/// Throws RangeError unless alpha is attained at every x of the domain.
EntropyFluxPair adapted_entropy_pair(const ScalarFlux& flux, double alpha);

/// x-independent convex eta with q(x, u) = int_0^u eta'(s) dB/dw(x, s) ds.
EntropyFluxPair convex_entropy_pair(const ScalarFlux& flux, const SmoothFunction& eta);

/// Sampled checks of the pair axioms.
struct PairValidation {
    /// max |eta_u B_u - q_u| off the jump set of K (q_u by central differences).
    double compatibility_error = 0.0;
    /// Most negative second difference of eta(x, .) seen.
    double convexity_defect = 0.0;
    /// max |q(x+, u+) - q(x-, u-)| over sampled RH pairs with u-, u+ on the
    /// same side of c_alpha.
    double interface_error = 0.0;
    /// max of q(x+, u+) - q(x-, u-) over all sampled RH pairs.
    double interface_max = 0.0;
    int rh_pairs = 0;
    /// RH pairs straddling c_alpha; they are excluded from interface_error.
    int side_violations = 0;
    std::vector<std::string> log;
};

/// `alpha` selects the same-side condition of the adapted pair; pass NaN for
/// a generic pair.
PairValidation validate_pair(const ScalarFlux& flux, const EntropyFluxPair& pair, double alpha, int samples = 41);

/// Convex piecewise-affine interpolant of eta(x, .) on the nodes c_i = c_{iC/N}(x).
struct AffineEntropy {
    double x = 0.0;
    int N = 0;
    double C = 0.0;
    /// Indices m(x)..n(x) with alpha_i = iC/N attained at x.
    int m = 0, n = 0;
    std::vector<double> alpha;  ///< alpha_i for i = m..n
    std::vector<double> c;      ///< c_i(x) for i = m..n
    std::vector<double> delta;  ///< slopes for i = m..n-1
    double a = 0.0;
    double b = 0.0;
    std::vector<double> b_i;  ///< i = m+1..n-1

    double eta_N(double u) const;
    /// b B(x, u) + sum b_i q^(alpha_i)(x, u) at the same side.
    double q_N(const ScalarFlux& flux, double u, Side side = Side::stored) const;
};

/// Throws RangeError when no alpha_i is attained at x. C defaults to flux.bound().
AffineEntropy affine_entropy_approx(const EntropyFluxPair& pair, const ScalarFlux& flux, int N, double x,
                                    Side side = Side::stored, double C = 0.0);

/// (eta^N, q^N) as a pair over the whole domain.
EntropyFluxPair affine_entropy_pair(const EntropyFluxPair& pair, const ScalarFlux& flux, int N, double C = 0.0);

/// Uniform-grid field of cell averages with one state per time level.
struct ClawField {
    double x_lo = 0.0, x_hi = 1.0;
    int cells = 0;
    double dx = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    /// Interface fluxes used by step n (cells + 1 entries each).
    std::vector<std::vector<double>> fluxes;
    /// |M(n+1) - M(n) + dt (F_right - F_left)| per step.
    std::vector<double> mass_drift;
    double cfl = 0.0;

    double center(int i) const { return x_lo + (i + 0.5) * dx; }
    double interface(int j) const { return x_lo + j * dx; }
    double mass(std::size_t n) const;
    /// The slice at level n as a step function.
    BVFunction slice(std::size_t n) const;
};

/// Godunov scheme with transmissive ends and forward Euler steps. Interior
/// interfaces use the upwind value of the monotone flux; at a jump of K the
/// upwind trace B(x-, u_L) (or B(x+, u_R)) is matched on the other side by
/// c-inversion, so steady states are exact members of A_x.
/// Throws PreconditionError if cfl > 1/2, cells < 4, or a jump of K is not
/// on a cell interface; RangeError if an interface flux cannot be inverted.
ClawField solve_claw(const ScalarFlux& flux, const BVFunction& u0, double T, int cells, double cfl = 0.45);

/// Field of exact cell averages of u(x, t) at the given times; `jumps(t)`
/// lists the discontinuities of u(., t).
ClawField sample_field(double x_lo, double x_hi, int cells, std::vector<double> times,
                       const std::function<double(double, double)>& u,
                       const std::function<std::vector<double>(double)>& jumps);

/// phi(x, t) = phi_x(x) phi_t(t), both nonnegative.
struct SpaceTimeTest {
    TestFunction space;
    TestFunction time;
};

/// Discrete pairing of phi with (eta(x, u))_t + (q(x, u))_x:
///     sum_n int phi(x, t_n) [eta(x, u^{n+1}) - eta(x, u^n)] dx
///   - sum_n (t_{n+1} - t_n) int phi_x(x, t_n) q(x, u^n) dx,
/// the second integral being the left side of the chain rule on the step
/// slice. Throws PreconditionError if phi takes negative values.
double entropy_residual(const ClawField& field, const ScalarFlux& flux, const EntropyFluxPair& pair,
                        const SpaceTimeTest& phi);

/// Rows x,t,u for every cell and time level. With `mass_drift` a fourth
/// column holds the drift of the step that produced the level (0 at t = 0).
void write_field_csv(std::ostream& out, const ClawField& field, bool mass_drift = false);

}  // namespace bvcalc
