#include "bvcalc/polynomial.hpp"

#include <cmath>
#include <stdexcept>

#include "bvcalc/errors.hpp"

namespace bvcalc {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) { trim(); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
    double r = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
    if (c_.empty()) return {};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(a));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& v : c_) v *= s;
    trim();
    return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    if (p.c_.empty() || q.c_.empty()) return {};
    std::vector<double> r(p.c_.size() + q.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.c_.size(); ++i)
        for (std::size_t j = 0; j < q.c_.size(); ++j) r[i + j] += p.c_[i] * q.c_[j];
    return Polynomial(std::move(r));
}

namespace {

// Root of a function that is monotone on [lo, hi] with a sign change.
double bisect_monotone(const Polynomial& p, double lo, double hi) {
    double flo = p(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = p(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> Polynomial::roots_in(double lo, double hi) const {
    std::vector<double> roots;
    if (degree() <= 0 || hi < lo) return roots;
    if (degree() == 1) {
        const double r = -c_[0] / c_[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    // Between consecutive critical points the polynomial is monotone.
    std::vector<double> pts{lo};
    for (double r : derivative().roots_in(lo, hi))
        if (r > lo && r < hi) pts.push_back(r);
    pts.push_back(hi);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double fp = (*this)(pts[i]);
        const double fq = (*this)(pts[i + 1]);
        if (fp == 0.0) roots.push_back(pts[i]);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0))
            roots.push_back(bisect_monotone(*this, pts[i], pts[i + 1]));
    }
    if ((*this)(hi) == 0.0) roots.push_back(hi);
    sort_unique(roots);
    return roots;
}

double Polynomial::max_abs(double lo, double hi) const {
    double m = std::max(std::abs((*this)(lo)), std::abs((*this)(hi)));
    for (double r : derivative().roots_in(lo, hi)) m = std::max(m, std::abs((*this)(r)));
    return m;
}

double Polynomial::integral_abs(double lo, double hi) const {
    if (is_zero()) return 0.0;
    const Polynomial prim = antiderivative();
    std::vector<double> pts{lo};
    for (double r : roots_in(lo, hi))
        if (r > lo && r < hi) pts.push_back(r);
    pts.push_back(hi);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += std::abs(prim(pts[i + 1]) - prim(pts[i]));
    return s;
}

// ---------------------------------------------------------------------------

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breaks, std::vector<Polynomial> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
    if (breaks_.size() < 2) throw PreconditionError("piecewise polynomial needs at least two breakpoints");
    if (pieces_.size() + 1 != breaks_.size())
        throw PreconditionError("piece count must equal breakpoint count - 1");
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
        if (!(breaks_[i] < breaks_[i + 1])) throw PreconditionError("breakpoints must be strictly increasing");
}

PiecewisePolynomial PiecewisePolynomial::single(double a, double b, Polynomial p) {
    return PiecewisePolynomial({a, b}, {std::move(p)});
}

std::size_t PiecewisePolynomial::locate(double x) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return std::min(idx, pieces_.size() - 1);
}

int PiecewisePolynomial::breakpoint_index(double x) const {
    const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    if (it != breaks_.end() && *it == x) return static_cast<int>(it - breaks_.begin());
    return -1;
}

double PiecewisePolynomial::operator()(double x) const { return pieces_[locate(x)](x); }

double PiecewisePolynomial::left_limit(double x) const {
    const int k = breakpoint_index(x);
    if (k > 0) return pieces_[static_cast<std::size_t>(k) - 1](x);
    return pieces_[locate(x)](x);
}

double PiecewisePolynomial::right_limit(double x) const {
    const int k = breakpoint_index(x);
    if (k >= 0 && static_cast<std::size_t>(k) < pieces_.size()) return pieces_[static_cast<std::size_t>(k)](x);
    return pieces_[locate(x)](x);
}

PiecewisePolynomial PiecewisePolynomial::derivative() const {
    std::vector<Polynomial> d;
    d.reserve(pieces_.size());
    for (const auto& p : pieces_) d.push_back(p.derivative());
    return PiecewisePolynomial(breaks_, std::move(d));
}

PiecewisePolynomial PiecewisePolynomial::refined(std::span<const double> points) const {
    std::vector<double> nb(breaks_.begin(), breaks_.end());
    for (double p : points)
        if (p > lower() && p < upper()) nb.push_back(p);
    sort_unique(nb);
    std::vector<Polynomial> np;
    np.reserve(nb.size() - 1);
    for (std::size_t i = 0; i + 1 < nb.size(); ++i) np.push_back(pieces_[locate(0.5 * (nb[i] + nb[i + 1]))]);
    return PiecewisePolynomial(std::move(nb), std::move(np));
}

PiecewisePolynomial& PiecewisePolynomial::operator*=(double s) {
    for (auto& p : pieces_) p *= s;
    return *this;
}

namespace {

template <typename Op>
PiecewisePolynomial combine(const PiecewisePolynomial& p, const PiecewisePolynomial& q, Op op) {
    if (p.empty()) return q;
    if (q.empty()) return p;
    if (p.lower() != q.lower() || p.upper() != q.upper())
        throw PreconditionError("piecewise polynomials live on different intervals");
    const auto rp = p.refined(q.breaks());
    const auto rq = q.refined(p.breaks());
    std::vector<Polynomial> pieces;
    pieces.reserve(rp.piece_count());
    for (std::size_t i = 0; i < rp.piece_count(); ++i) pieces.push_back(op(rp.pieces()[i], rq.pieces()[i]));
    return PiecewisePolynomial(std::vector<double>(rp.breaks().begin(), rp.breaks().end()), std::move(pieces));
}

}  // namespace

PiecewisePolynomial operator+(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    return combine(p, q, [](const Polynomial& a, const Polynomial& b) { return a + b; });
}

PiecewisePolynomial operator-(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    if (p.empty()) return q * -1.0;
    return combine(p, q, [](const Polynomial& a, const Polynomial& b) { return a - b; });
}

PiecewisePolynomial operator*(const PiecewisePolynomial& p, const PiecewisePolynomial& q) {
    if (p.empty() || q.empty()) return {};
    return combine(p, q, [](const Polynomial& a, const Polynomial& b) { return a * b; });
}

double PiecewisePolynomial::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Polynomial prim = pieces_[i].antiderivative();
        s += prim(breaks_[i + 1]) - prim(breaks_[i]);
    }
    return s;
}

double PiecewisePolynomial::integral_abs() const {
    double s = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) s += pieces_[i].integral_abs(breaks_[i], breaks_[i + 1]);
    return s;
}

std::vector<double> PiecewisePolynomial::kinks_of_abs() const {
    std::vector<double> k(breaks_.begin(), breaks_.end());
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        for (double r : pieces_[i].roots_in(breaks_[i], breaks_[i + 1])) k.push_back(r);
    sort_unique(k);
    return k;
}

}  // namespace bvcalc
