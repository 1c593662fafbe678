#include "bvcalc/bv_function.hpp"

#include <algorithm>
#include <cmath>

#include "bvcalc/errors.hpp"

namespace bvcalc {

RepresentativePolicy RepresentativePolicy::with_theta(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("theta must lie in [0,1]");
    return {t};
}

BVFunction::BVFunction(Interval domain, PiecewisePolynomial smooth, std::vector<CantorComponent> cantor,
                       RepresentativePolicy policy)
    : domain_(domain), smooth_(std::move(smooth)), policy_(policy) {
    if (smooth_.empty()) smooth_ = PiecewisePolynomial::single(domain.a, domain.b, Polynomial());
    if (smooth_.lower() != domain.a || smooth_.upper() != domain.b)
        throw PreconditionError("smooth part must span the domain");
    std::vector<CantorBase> bases;
    for (const auto& c : cantor) {
        if (c.base.support.a < domain.a || c.base.support.b > domain.b)
            throw PreconditionError("Cantor support " + c.base.id() + " leaves the domain");
        auto it = std::find_if(cantor_.begin(), cantor_.end(), [&](const CantorComponent& e) { return e.base == c.base; });
        if (it != cantor_.end()) {
            it->coefficient += c.coefficient;
        } else if (c.coefficient != 0.0) {
            cantor_.push_back(c);
            bases.push_back(c.base);
        }
    }
    std::erase_if(cantor_, [](const CantorComponent& c) { return c.coefficient == 0.0; });
    check_cantor_dictionary(bases);
}

BVFunction BVFunction::constant(Interval domain, double c) {
    return BVFunction(domain, PiecewisePolynomial::single(domain.a, domain.b, Polynomial::constant(c)));
}

BVFunction BVFunction::polynomial(Interval domain, Polynomial p) {
    return BVFunction(domain, PiecewisePolynomial::single(domain.a, domain.b, std::move(p)));
}

BVFunction BVFunction::heaviside(Interval domain, double x0, double lo, double hi) {
    return piecewise_constant(domain, {x0}, {lo, hi});
}

BVFunction BVFunction::cantor_function(Interval domain, CantorBase base, double coefficient) {
    return BVFunction(domain, {}, {{base, coefficient}});
}

BVFunction BVFunction::piecewise_constant(Interval domain, std::vector<double> nodes, std::vector<double> values) {
    if (values.size() != nodes.size() + 1) throw PreconditionError("piecewise_constant needs one more value than nodes");
    std::vector<double> breaks{domain.a};
    for (double n : nodes) {
        if (!domain.contains_open(n)) throw PreconditionError("step node outside the open domain");
        breaks.push_back(n);
    }
    breaks.push_back(domain.b);
    std::vector<Polynomial> pieces;
    for (double v : values) pieces.push_back(Polynomial::constant(v));
    return BVFunction(domain, PiecewisePolynomial(std::move(breaks), std::move(pieces)));
}

BVFunction BVFunction::with_policy(RepresentativePolicy p) const {
    BVFunction f = *this;
    f.policy_ = p;
    return f;
}

double BVFunction::cantor_value(double x) const {
    double s = 0.0;
    for (const auto& c : cantor_) s += c.coefficient * c.base.cantor_function(x);
    return s;
}

double BVFunction::eval(double x, Side side) const {
    const bool interior = domain_.contains_open(x);
    const bool ok = interior || (side == Side::left && x == domain_.b) || (side == Side::right && x == domain_.a);
    if (!ok) throw DomainError("BV evaluation outside the domain");
    const double c = cantor_value(x);
    switch (side) {
        case Side::left: return smooth_.left_limit(x) + c;
        case Side::right: return smooth_.right_limit(x) + c;
        case Side::precise: return 0.5 * (smooth_.left_limit(x) + smooth_.right_limit(x)) + c;
        case Side::stored: return policy_.select(smooth_.left_limit(x), smooth_.right_limit(x)) + c;
    }
    return 0.0;
}

std::vector<double> BVFunction::breakpoints() const {
    const auto b = smooth_.breaks();
    return std::vector<double>(b.begin() + 1, b.end() - 1);
}

std::vector<double> BVFunction::jump_set() const {
    std::vector<double> j;
    for (double x : breakpoints())
        if (smooth_.left_limit(x) != smooth_.right_limit(x)) j.push_back(x);
    return j;
}

std::vector<CantorBase> BVFunction::cantor_bases() const {
    std::vector<CantorBase> b;
    for (const auto& c : cantor_) b.push_back(c.base);
    return b;
}

Integrand BVFunction::integrand(Side side) const {
    Integrand g;
    g.fn = [self = *this, side](double x) {
        if (!self.domain_.contains_open(x)) return 0.0;
        return self.eval(x, side);
    };
    g.breaks = breakpoints();
    for (const auto& c : cantor_) g.cantor_supports.push_back(c.base.support);
    return g;
}

BVFunction& BVFunction::operator+=(const BVFunction& o) {
    if (!(o.domain_ == domain_)) throw PreconditionError("BV functions live on different domains");
    std::vector<CantorComponent> merged = cantor_;
    merged.insert(merged.end(), o.cantor_.begin(), o.cantor_.end());
    *this = BVFunction(domain_, smooth_ + o.smooth_, std::move(merged), policy_);
    return *this;
}

BVFunction& BVFunction::operator*=(double s) {
    smooth_ *= s;
    for (auto& c : cantor_) c.coefficient *= s;
    if (s == 0.0) cantor_.clear();
    return *this;
}

BVVector::BVVector(std::vector<BVFunction> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw PreconditionError("BV vector needs at least one component");
    for (const auto& c : comps_)
        if (!(c.domain() == comps_.front().domain())) throw PreconditionError("components live on different domains");
    check_cantor_dictionary(cantor_bases());
}

std::vector<double> BVVector::eval(double x, Side side) const {
    std::vector<double> out(comps_.size());
    eval_into(x, side, out);
    return out;
}

void BVVector::eval_into(double x, Side side, std::span<double> out) const {
    for (std::size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(x, side);
}

std::vector<double> BVVector::jump_set() const {
    std::vector<double> j;
    for (const auto& c : comps_) {
        const auto cj = c.jump_set();
        j.insert(j.end(), cj.begin(), cj.end());
    }
    sort_unique(j);
    return j;
}

std::vector<double> BVVector::breakpoints() const {
    std::vector<double> j;
    for (const auto& c : comps_) {
        const auto cj = c.breakpoints();
        j.insert(j.end(), cj.begin(), cj.end());
    }
    sort_unique(j);
    return j;
}

std::vector<CantorBase> BVVector::cantor_bases() const {
    std::vector<CantorBase> out;
    for (const auto& c : comps_)
        for (const auto& b : c.cantor_bases())
            if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    return out;
}

BVVector BVVector::with_policy(RepresentativePolicy p) const {
    std::vector<BVFunction> c;
    for (const auto& f : comps_) c.push_back(f.with_policy(p));
    return BVVector(std::move(c));
}

TestFunction::TestFunction(Interval support, std::function<double(double)> value,
                           std::function<double(double)> derivative)
    : support_(support), value_(std::move(value)), derivative_(std::move(derivative)) {
    constexpr int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double x = support_.a + support_.length() * i / n;
        sup_ = std::max(sup_, std::abs(value_(x)));
        lip_ = std::max(lip_, std::abs(derivative_(x)));
    }
    sup_ *= 1.05;
    lip_ *= 1.05;
}

TestFunction TestFunction::bump(double center, double radius, double amp) {
    if (!(radius > 0.0)) throw PreconditionError("bump radius must be positive");
    auto v = [=](double x) {
        const double t = (x - center) / radius;
        if (t <= -1.0 || t >= 1.0) return 0.0;
        const double s = 1.0 - t * t;
        return amp * s * s;
    };
    auto d = [=](double x) {
        const double t = (x - center) / radius;
        if (t <= -1.0 || t >= 1.0) return 0.0;
        return amp * (-4.0 * t * (1.0 - t * t)) / radius;
    };
    return TestFunction(Interval(center - radius, center + radius), v, d);
}

TestFunction TestFunction::bump_times(double center, double radius, Polynomial p) {
    const TestFunction b = bump(center, radius);
    const Polynomial dp = p.derivative();
    auto v = [b, p](double x) { return b(x) * p(x); };
    auto d = [b, p, dp](double x) { return b.derivative(x) * p(x) + b(x) * dp(x); };
    return TestFunction(b.support(), v, d);
}

Integrand TestFunction::value_integrand() const {
    Integrand g;
    g.fn = value_;
    g.breaks = {support_.a, support_.b};
    g.support_lo = support_.a;
    g.support_hi = support_.b;
    return g;
}

Integrand TestFunction::derivative_integrand() const {
    Integrand g = value_integrand();
    g.fn = derivative_;
    return g;
}

}  // namespace bvcalc
