#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bvcalc/cantor.hpp"
#include "bvcalc/interval.hpp"
#include "bvcalc/polynomial.hpp"
#include "bvcalc/quadrature.hpp"

namespace bvcalc {

struct Atom {
    double x = 0.0;
    double weight = 0.0;
};

struct CantorComponent {
    CantorBase base;
    double coefficient = 0.0;
};

/// scale * g(x) dx with a density outside the polynomial class.
struct WeightedDensity {
    Integrand density;
    double scale = 1.0;
};

/// scale * g(x) d(mu_base): a Cantor measure times a continuous weight.
struct WeightedCantor {
    CantorBase base;
    Integrand weight;
    double scale = 1.0;
};

/// Signed Radon measure on an open interval: absolutely continuous part,
/// finitely many atoms and components on a Cantor dictionary.
///
/// The closed-form parts are a piecewise-polynomial density, the atom list
/// and constant multiples of Cantor bases. Products with BV functions (the
/// Leibniz rule) produce densities and Cantor weights that are not
/// polynomial; those live in the weighted lists and are integrated
/// numerically.
class RadonMeasure {
public:
    RadonMeasure() = default;
    explicit RadonMeasure(Interval domain) : domain_(domain) {}
    RadonMeasure(Interval domain, PiecewisePolynomial ac, std::vector<Atom> atoms,
                 std::vector<CantorComponent> cantor);

    static RadonMeasure dirac(Interval domain, double x, double weight = 1.0);
    static RadonMeasure lebesgue(Interval domain, double density = 1.0);
    static RadonMeasure cantor_measure(Interval domain, CantorBase base, double coefficient = 1.0);

    const Interval& domain() const { return domain_; }
    const PiecewisePolynomial& ac() const { return ac_; }
    std::span<const Atom> atoms() const { return atoms_; }
    std::span<const CantorComponent> cantor() const { return cantor_; }
    std::span<const WeightedDensity> weighted_densities() const { return densities_; }
    std::span<const WeightedCantor> weighted_cantor() const { return weighted_cantor_; }

    /// True when every part is in the closed-form class.
    bool closed_form() const { return densities_.empty() && weighted_cantor_.empty(); }
    /// Every Cantor base referenced by the measure, without repetition.
    std::vector<CantorBase> cantor_bases() const;

    /// Adds an atom, merging with an existing one and dropping zero weights.
    RadonMeasure& add_atom(double x, double weight);
    /// Adds c * mu_base; throws RepresentationError on an incompatible base.
    RadonMeasure& add_cantor(const CantorBase& base, double coefficient);
    RadonMeasure& add_density(Integrand density, double scale = 1.0);
    RadonMeasure& add_weighted_cantor(const CantorBase& base, Integrand weight, double scale = 1.0);
    RadonMeasure& add_ac(const PiecewisePolynomial& density);

    RadonMeasure& operator+=(const RadonMeasure& other);
    RadonMeasure& operator*=(double s);
    friend RadonMeasure operator+(RadonMeasure l, const RadonMeasure& r) { return l += r; }
    friend RadonMeasure operator-(RadonMeasure l, RadonMeasure r) { return l += (r *= -1.0); }
    friend RadonMeasure operator*(RadonMeasure m, double s) { return m *= s; }
    friend RadonMeasure operator*(double s, RadonMeasure m) { return m *= s; }

    /// nabla u dx: the absolutely continuous part.
    RadonMeasure ac_part() const;
    /// D^c u: Cantor components.
    RadonMeasure cantor_part() const;
    /// D^j u: the atoms.
    RadonMeasure jump_part() const;
    /// Everything but the atoms.
    RadonMeasure diffuse_part() const;

    /// mu(]lo, hi[) plus the atoms at included endpoints. Closed form only.
    double mass(double lo, double hi, bool include_lo = false, bool include_hi = false) const;

private:
    void check_base(const CantorBase& base) const;

    Interval domain_;
    PiecewisePolynomial ac_;
    std::vector<Atom> atoms_;
    std::vector<CantorComponent> cantor_;
    std::vector<WeightedDensity> densities_;
    std::vector<WeightedCantor> weighted_cantor_;
};

/// Value used for f at atoms; by default f itself.
using AtomValue = std::function<double(double)>;

/// Integral of f against mu. The ac part is integrated adaptively with
/// subdivision at the breakpoints of f and of the density; Cantor parts use
/// integrate_cantor at opt.cantor_depth (derived from opt.tol when 0).
double integrate_measure(const Integrand& f, const RadonMeasure& mu, const QuadratureOptions& opt,
                         const AtomValue& at_atoms = {});
double integrate_measure(const Integrand& f, const RadonMeasure& mu, double tol = 1e-9);

/// |mu|(domain). Weighted parts are integrated numerically to `tol`.
double measure_total_variation(const RadonMeasure& mu, double tol = 1e-10);

/// The variation measure |mu|.
RadonMeasure variation_measure(const RadonMeasure& mu);

/// Per-base density of a Cantor measure against a reference Cantor measure.
struct CantorDensity {
    std::vector<CantorBase> bases;
    std::vector<double> values;

    /// Density on `base`; 0 for bases not listed.
    double on(const CantorBase& base) const;
    /// sum_j values_j * lambda_j restricted to the listed bases.
    RadonMeasure reconstruct(const RadonMeasure& lambda) const;
};

/// d nu / d lambda for purely Cantor measures. Throws PreconditionError when
/// nu is not absolutely continuous with respect to lambda or either measure
/// has non-Cantor parts.
CantorDensity radon_nikodym_cantor(const RadonMeasure& nu, const RadonMeasure& lambda);

/// The kernel (15/16)(1 - t^2)^2 on [-1, 1] and its derivative.
double mollifier(double t);
double mollifier_derivative(double t);
/// Integral of the kernel from -1 to t.
double mollifier_cdf(double t);

/// (mu * phi_eps)(x). Throws DomainError unless [x - eps, x + eps] lies in the domain.
double mollified_measure_eval(const RadonMeasure& mu, double eps, double x, double tol = 1e-10);

}  // namespace bvcalc
