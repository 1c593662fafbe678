#pragma once

#include <span>
#include <vector>

#include "bvcalc/interval.hpp"

namespace bvcalc {

/// Real polynomial in the monomial basis, c[0] + c[1] x + c[2] x^2 + ...
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coefficients);
    static Polynomial constant(double c) { return Polynomial({c}); }

    double operator()(double x) const;
    Polynomial derivative() const;
    /// Antiderivative with zero constant term.
    Polynomial antiderivative() const;

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::span<const double> coefficients() const { return c_; }

    /// Real roots in [lo, hi], sorted, each listed once.
    std::vector<double> roots_in(double lo, double hi) const;
    /// max |p| over [lo, hi].
    double max_abs(double lo, double hi) const;
    /// Integral of |p| over [lo, hi], exact up to root isolation.
    double integral_abs(double lo, double hi) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
    friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
    friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
    friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
    friend Polynomial operator*(const Polynomial& p, const Polynomial& q);

private:
    void trim();
    std::vector<double> c_;
};

/// Piecewise polynomial on [breaks.front(), breaks.back()].
///
/// Piece i lives on the open interval ]breaks[i], breaks[i+1][. Values at a
/// breakpoint are resolved by the caller through left_limit / right_limit.
class PiecewisePolynomial {
public:
    PiecewisePolynomial() = default;
    PiecewisePolynomial(std::vector<double> breaks, std::vector<Polynomial> pieces);
    /// A single polynomial over [a, b].
    static PiecewisePolynomial single(double a, double b, Polynomial p);

    double lower() const { return breaks_.front(); }
    double upper() const { return breaks_.back(); }
    bool empty() const { return breaks_.empty(); }
    std::span<const double> breaks() const { return breaks_; }
    std::span<const Polynomial> pieces() const { return pieces_; }
    std::size_t piece_count() const { return pieces_.size(); }

    /// Index of the piece whose half-open span [breaks[i], breaks[i+1]) holds x;
    /// the upper endpoint maps to the last piece.
    std::size_t locate(double x) const;
    /// Index of x among the breakpoints, or -1.
    int breakpoint_index(double x) const;

    /// Value of the piece containing x in its interior; at a breakpoint this
    /// is the right limit (left limit at the upper endpoint).
    double operator()(double x) const;
    double left_limit(double x) const;
    double right_limit(double x) const;

    PiecewisePolynomial derivative() const;
    /// Same function on a finer partition containing every point of `points`.
    PiecewisePolynomial refined(std::span<const double> points) const;

    PiecewisePolynomial& operator*=(double s);
    friend PiecewisePolynomial operator*(PiecewisePolynomial p, double s) { return p *= s; }
    friend PiecewisePolynomial operator+(const PiecewisePolynomial& p, const PiecewisePolynomial& q);
    friend PiecewisePolynomial operator-(const PiecewisePolynomial& p, const PiecewisePolynomial& q);
    /// Pointwise product on the common refinement.
    friend PiecewisePolynomial operator*(const PiecewisePolynomial& p, const PiecewisePolynomial& q);

    /// Integral of the function over [lower, upper].
    double integral() const;
    /// Integral of |p| over [lower, upper].
    double integral_abs() const;
    /// Breakpoints plus sign changes of every piece.
    std::vector<double> kinks_of_abs() const;

private:
    std::vector<double> breaks_;
    std::vector<Polynomial> pieces_;
};

}  // namespace bvcalc
