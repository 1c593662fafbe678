#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bvcalc/measure.hpp"
#include "bvcalc/polynomial.hpp"

namespace bvcalc {

/// Value stored at a jump: theta * u(x-) + (1 - theta) * u(x+).
struct RepresentativePolicy {
    double theta = 0.5;

    static RepresentativePolicy left() { return {1.0}; }
    static RepresentativePolicy right() { return {0.0}; }
    static RepresentativePolicy precise() { return {0.5}; }
    static RepresentativePolicy with_theta(double t);

    double select(double left_value, double right_value) const {
        return theta * left_value + (1.0 - theta) * right_value;
    }
};

/// Closed-form BV function on an open interval: a piecewise polynomial plus
/// constant multiples of rescaled Cantor functions.
///
/// Jumps happen only at breakpoints of the smooth part; the Cantor summands
/// are continuous.
class BVFunction {
public:
    BVFunction() = default;
    BVFunction(Interval domain, PiecewisePolynomial smooth, std::vector<CantorComponent> cantor = {},
               RepresentativePolicy policy = {});

    static BVFunction constant(Interval domain, double c);
    static BVFunction polynomial(Interval domain, Polynomial p);
    /// lo on ]a, x0[, hi on ]x0, b[.
    static BVFunction heaviside(Interval domain, double x0, double lo = 0.0, double hi = 1.0);
    static BVFunction cantor_function(Interval domain, CantorBase base, double coefficient = 1.0);
    /// Steps: values[i] on ]nodes[i-1], nodes[i][ with nodes interior.
    static BVFunction piecewise_constant(Interval domain, std::vector<double> nodes, std::vector<double> values);

    const Interval& domain() const { return domain_; }
    const PiecewisePolynomial& smooth() const { return smooth_; }
    std::span<const CantorComponent> cantor() const { return cantor_; }
    const RepresentativePolicy& policy() const { return policy_; }
    BVFunction with_policy(RepresentativePolicy p) const;

    double eval(double x, Side side = Side::stored) const;
    double left(double x) const { return eval(x, Side::left); }
    double right(double x) const { return eval(x, Side::right); }
    double precise(double x) const { return eval(x, Side::precise); }
    /// Sum of the Cantor summands at x.
    double cantor_value(double x) const;

    /// Interior breakpoints of the smooth part.
    std::vector<double> breakpoints() const;
    /// Breakpoints where the one-sided limits differ.
    std::vector<double> jump_set() const;
    double jump(double x) const { return right(x) - left(x); }
    std::vector<CantorBase> cantor_bases() const;
    bool has_cantor() const { return !cantor_.empty(); }

    /// The function as a quadrature integrand reading `side` values.
    Integrand integrand(Side side = Side::stored) const;

    BVFunction& operator+=(const BVFunction& o);
    BVFunction& operator*=(double s);
    friend BVFunction operator+(BVFunction l, const BVFunction& r) { return l += r; }
    friend BVFunction operator-(BVFunction l, BVFunction r) { return l += (r *= -1.0); }
    friend BVFunction operator*(BVFunction f, double s) { return f *= s; }
    friend BVFunction operator*(double s, BVFunction f) { return f *= s; }

private:
    Interval domain_;
    PiecewisePolynomial smooth_;
    std::vector<CantorComponent> cantor_;
    RepresentativePolicy policy_;
};

/// BV map into R^d with components on a common domain.
class BVVector {
public:
    BVVector() = default;
    explicit BVVector(std::vector<BVFunction> components);
    BVVector(BVFunction scalar) : BVVector(std::vector<BVFunction>{std::move(scalar)}) {}  // NOLINT

    std::size_t dim() const { return comps_.size(); }
    const Interval& domain() const { return comps_.front().domain(); }
    const BVFunction& operator[](std::size_t i) const { return comps_[i]; }
    std::span<const BVFunction> components() const { return comps_; }

    std::vector<double> eval(double x, Side side = Side::stored) const;
    void eval_into(double x, Side side, std::span<double> out) const;
    /// Union of the component jump sets.
    std::vector<double> jump_set() const;
    std::vector<double> breakpoints() const;
    std::vector<CantorBase> cantor_bases() const;
    BVVector with_policy(RepresentativePolicy p) const;

private:
    std::vector<BVFunction> comps_;
};

/// C^1 test function with compact support in the domain and closed-form
/// derivative.
class TestFunction {
public:
    TestFunction() = default;
    TestFunction(Interval support, std::function<double(double)> value, std::function<double(double)> derivative);

    /// amp * m((x - c) / r) with m(t) = (1 - t^2)^2 on [-1, 1].
    static TestFunction bump(double center, double radius, double amp = 1.0);
    /// bump(center, radius) times the polynomial p.
    static TestFunction bump_times(double center, double radius, Polynomial p);

    const Interval& support() const { return support_; }
    double operator()(double x) const { return value_(x); }
    double derivative(double x) const { return derivative_(x); }
    /// Upper bounds for |phi| and |phi'| from a dense sample with 5% margin.
    double sup() const { return sup_; }
    double lipschitz() const { return lip_; }

    Integrand value_integrand() const;
    Integrand derivative_integrand() const;

private:
    Interval support_;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    double sup_ = 0.0;
    double lip_ = 0.0;
};

}  // namespace bvcalc
