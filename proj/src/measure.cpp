#include "bvcalc/measure.hpp"

#include <algorithm>
#include <cmath>

#include "bvcalc/errors.hpp"

namespace bvcalc {

namespace {

bool ac_is_zero(const PiecewisePolynomial& p) {
    if (p.empty()) return true;
    return std::all_of(p.pieces().begin(), p.pieces().end(), [](const Polynomial& q) { return q.is_zero(); });
}

int derived_cantor_depth(const QuadratureOptions& opt, double length) {
    if (opt.cantor_depth > 0) return opt.cantor_depth;
    return cantor_depth_for(opt.tol, opt.lipschitz, length);
}

}  // namespace

RadonMeasure::RadonMeasure(Interval domain, PiecewisePolynomial ac, std::vector<Atom> atoms,
                           std::vector<CantorComponent> cantor)
    : domain_(domain) {
    add_ac(ac);
    for (const Atom& a : atoms) add_atom(a.x, a.weight);
    for (const CantorComponent& c : cantor) add_cantor(c.base, c.coefficient);
}

RadonMeasure RadonMeasure::dirac(Interval domain, double x, double weight) {
    RadonMeasure m(domain);
    m.add_atom(x, weight);
    return m;
}

RadonMeasure RadonMeasure::lebesgue(Interval domain, double density) {
    RadonMeasure m(domain);
    m.add_ac(PiecewisePolynomial::single(domain.a, domain.b, Polynomial::constant(density)));
    return m;
}

RadonMeasure RadonMeasure::cantor_measure(Interval domain, CantorBase base, double coefficient) {
    RadonMeasure m(domain);
    m.add_cantor(base, coefficient);
    return m;
}

std::vector<CantorBase> RadonMeasure::cantor_bases() const {
    std::vector<CantorBase> out;
    auto push = [&](const CantorBase& b) {
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    };
    for (const auto& c : cantor_) push(c.base);
    for (const auto& c : weighted_cantor_) push(c.base);
    return out;
}

void RadonMeasure::check_base(const CantorBase& base) const {
    if (base.support.a < domain_.a || base.support.b > domain_.b)
        throw PreconditionError("Cantor support " + base.id() + " leaves the domain");
    std::vector<CantorBase> all = cantor_bases();
    all.push_back(base);
    check_cantor_dictionary(all);
}

RadonMeasure& RadonMeasure::add_atom(double x, double weight) {
    if (!(x > domain_.a && x < domain_.b)) throw PreconditionError("atom outside the open domain");
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.x < v; });
    if (it != atoms_.end() && it->x == x) {
        it->weight += weight;
        if (it->weight == 0.0) atoms_.erase(it);
    } else if (weight != 0.0) {
        atoms_.insert(it, Atom{x, weight});
    }
    return *this;
}

RadonMeasure& RadonMeasure::add_cantor(const CantorBase& base, double coefficient) {
    check_base(base);
    auto it = std::find_if(cantor_.begin(), cantor_.end(), [&](const CantorComponent& c) { return c.base == base; });
    if (it != cantor_.end()) {
        it->coefficient += coefficient;
        if (it->coefficient == 0.0) cantor_.erase(it);
    } else if (coefficient != 0.0) {
        cantor_.push_back({base, coefficient});
    }
    return *this;
}

RadonMeasure& RadonMeasure::add_density(Integrand density, double scale) {
    if (scale != 0.0) densities_.push_back({std::move(density), scale});
    return *this;
}

RadonMeasure& RadonMeasure::add_weighted_cantor(const CantorBase& base, Integrand weight, double scale) {
    check_base(base);
    if (scale != 0.0) weighted_cantor_.push_back({base, std::move(weight), scale});
    return *this;
}

RadonMeasure& RadonMeasure::add_ac(const PiecewisePolynomial& density) {
    if (density.empty()) return *this;
    if (density.lower() != domain_.a || density.upper() != domain_.b)
        throw PreconditionError("density must span the whole domain");
    ac_ = ac_ + density;
    return *this;
}

RadonMeasure& RadonMeasure::operator+=(const RadonMeasure& other) {
    if (!(other.domain_ == domain_)) throw PreconditionError("measures live on different domains");
    add_ac(other.ac_);
    for (const Atom& a : other.atoms_) add_atom(a.x, a.weight);
    for (const auto& c : other.cantor_) add_cantor(c.base, c.coefficient);
    for (const auto& d : other.densities_) add_density(d.density, d.scale);
    for (const auto& c : other.weighted_cantor_) add_weighted_cantor(c.base, c.weight, c.scale);
    return *this;
}

RadonMeasure& RadonMeasure::operator*=(double s) {
    if (s == 0.0) {
        *this = RadonMeasure(domain_);
        return *this;
    }
    ac_ *= s;
    for (auto& a : atoms_) a.weight *= s;
    for (auto& c : cantor_) c.coefficient *= s;
    for (auto& d : densities_) d.scale *= s;
    for (auto& c : weighted_cantor_) c.scale *= s;
    return *this;
}

RadonMeasure RadonMeasure::ac_part() const {
    RadonMeasure m(domain_);
    m.ac_ = ac_;
    m.densities_ = densities_;
    return m;
}

RadonMeasure RadonMeasure::cantor_part() const {
    RadonMeasure m(domain_);
    m.cantor_ = cantor_;
    m.weighted_cantor_ = weighted_cantor_;
    return m;
}

RadonMeasure RadonMeasure::jump_part() const {
    RadonMeasure m(domain_);
    m.atoms_ = atoms_;
    return m;
}

RadonMeasure RadonMeasure::diffuse_part() const {
    RadonMeasure m = *this;
    m.atoms_.clear();
    return m;
}

double RadonMeasure::mass(double lo, double hi, bool include_lo, bool include_hi) const {
    if (!closed_form()) throw RepresentationError("mass() needs a closed-form measure");
    if (!(hi >= lo)) return 0.0;
    double s = 0.0;
    if (!ac_.empty()) {
        const double l = std::max(lo, ac_.lower());
        const double h = std::min(hi, ac_.upper());
        const auto br = ac_.breaks();
        for (std::size_t i = 0; i < ac_.piece_count(); ++i) {
            const double pl = std::max(l, br[i]);
            const double ph = std::min(h, br[i + 1]);
            if (ph > pl) {
                const Polynomial prim = ac_.pieces()[i].antiderivative();
                s += prim(ph) - prim(pl);
            }
        }
    }
    for (const Atom& a : atoms_)
        if ((a.x > lo && a.x < hi) || (include_lo && a.x == lo) || (include_hi && a.x == hi)) s += a.weight;
    for (const auto& c : cantor_) s += c.coefficient * (c.base.cantor_function(hi) - c.base.cantor_function(lo));
    return s;
}

double integrate_measure(const Integrand& f, const RadonMeasure& mu, const QuadratureOptions& opt,
                         const AtomValue& at_atoms) {
    double total = 0.0;
    const Interval& dom = mu.domain();

    if (!ac_is_zero(mu.ac())) {
        Integrand g = product(f, [ac = mu.ac()](double x) { return ac(x); });
        g.breaks.insert(g.breaks.end(), mu.ac().breaks().begin(), mu.ac().breaks().end());
        sort_unique(g.breaks);
        total += integrate_lebesgue(g, dom.a, dom.b, opt);
    }
    for (const auto& d : mu.weighted_densities())
        total += d.scale * integrate_lebesgue(product(f, d.density), dom.a, dom.b, opt);

    for (const Atom& a : mu.atoms()) {
        if (a.x < f.support_lo || a.x > f.support_hi) continue;
        const double v = at_atoms ? at_atoms(a.x) : f.fn(a.x);
        if (!std::isfinite(v)) throw QuadratureError("integrand is not finite at an atom");
        total += v * a.weight;
    }

    for (const auto& c : mu.cantor())
        total += c.coefficient * integrate_cantor(f, c.base, derived_cantor_depth(opt, c.base.support.length()));
    for (const auto& c : mu.weighted_cantor())
        total += c.scale *
                 integrate_cantor(product(f, c.weight), c.base, derived_cantor_depth(opt, c.base.support.length()));
    return total;
}

double integrate_measure(const Integrand& f, const RadonMeasure& mu, double tol) {
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate_measure(f, mu, opt);
}

namespace {

// ac density plus all weighted densities as one integrand.
Integrand combined_density(const RadonMeasure& mu) {
    Integrand g;
    std::vector<WeightedDensity> extras(mu.weighted_densities().begin(), mu.weighted_densities().end());
    PiecewisePolynomial ac = mu.ac();
    g.fn = [ac, extras](double x) {
        double v = ac.empty() ? 0.0 : ac(x);
        for (const auto& d : extras) v += d.scale * d.density(x);
        return v;
    };
    if (!ac.empty()) {
        const auto k = ac.kinks_of_abs();
        g.breaks.assign(k.begin(), k.end());
    }
    for (const auto& d : extras) {
        g.breaks.insert(g.breaks.end(), d.density.breaks.begin(), d.density.breaks.end());
        for (const Interval& s : d.density.cantor_supports) g.cantor_supports.push_back(s);
    }
    sort_unique(g.breaks);
    return g;
}

// Coefficient plus weights of one Cantor base as one integrand.
Integrand combined_cantor_weight(const RadonMeasure& mu, const CantorBase& base) {
    double c = 0.0;
    for (const auto& comp : mu.cantor())
        if (comp.base == base) c += comp.coefficient;
    std::vector<WeightedCantor> extras;
    for (const auto& w : mu.weighted_cantor())
        if (w.base == base) extras.push_back(w);
    Integrand g;
    g.fn = [c, extras](double x) {
        double v = c;
        for (const auto& w : extras) v += w.scale * w.weight(x);
        return v;
    };
    for (const auto& w : extras) g.breaks.insert(g.breaks.end(), w.weight.breaks.begin(), w.weight.breaks.end());
    sort_unique(g.breaks);
    return g;
}

Integrand absolute(Integrand g) {
    g.fn = [f = std::move(g.fn)](double x) { return std::abs(f(x)); };
    return g;
}

}  // namespace

double measure_total_variation(const RadonMeasure& mu, double tol) {
    double tv = 0.0;
    for (const Atom& a : mu.atoms()) tv += std::abs(a.weight);
    if (mu.closed_form()) {
        if (!mu.ac().empty()) tv += mu.ac().integral_abs();
        for (const auto& c : mu.cantor()) tv += std::abs(c.coefficient);
        return tv;
    }
    QuadratureOptions opt;
    opt.tol = tol;
    if (mu.weighted_densities().empty()) {
        if (!mu.ac().empty()) tv += mu.ac().integral_abs();
    } else {
        tv += integrate_lebesgue(absolute(combined_density(mu)), mu.domain().a, mu.domain().b, opt);
    }
    for (const CantorBase& b : mu.cantor_bases()) {
        const Integrand w = combined_cantor_weight(mu, b);
        const int depth = derived_cantor_depth(opt, b.support.length());
        tv += integrate_cantor(absolute(w), b, std::min(depth, 18));
    }
    return tv;
}

RadonMeasure variation_measure(const RadonMeasure& mu) {
    RadonMeasure out(mu.domain());
    for (const Atom& a : mu.atoms()) out.add_atom(a.x, std::abs(a.weight));
    if (mu.weighted_densities().empty()) {
        if (!mu.ac().empty()) {
            const auto kinks = mu.ac().kinks_of_abs();
            PiecewisePolynomial r = mu.ac().refined(kinks);
            std::vector<Polynomial> pieces(r.pieces().begin(), r.pieces().end());
            const auto br = r.breaks();
            for (std::size_t i = 0; i < pieces.size(); ++i)
                if (pieces[i](0.5 * (br[i] + br[i + 1])) < 0.0) pieces[i] *= -1.0;
            out.add_ac(PiecewisePolynomial(std::vector<double>(br.begin(), br.end()), std::move(pieces)));
        }
    } else {
        out.add_density(absolute(combined_density(mu)));
    }
    for (const CantorBase& b : mu.cantor_bases()) {
        const bool weighted = std::any_of(mu.weighted_cantor().begin(), mu.weighted_cantor().end(),
                                          [&](const WeightedCantor& w) { return w.base == b; });
        if (weighted) {
            out.add_weighted_cantor(b, absolute(combined_cantor_weight(mu, b)));
        } else {
            for (const auto& c : mu.cantor())
                if (c.base == b) out.add_cantor(b, std::abs(c.coefficient));
        }
    }
    return out;
}

double CantorDensity::on(const CantorBase& base) const {
    for (std::size_t i = 0; i < bases.size(); ++i)
        if (bases[i] == base) return values[i];
    return 0.0;
}

RadonMeasure CantorDensity::reconstruct(const RadonMeasure& lambda) const {
    RadonMeasure out(lambda.domain());
    for (const auto& c : lambda.cantor()) out.add_cantor(c.base, on(c.base) * c.coefficient);
    return out;
}

CantorDensity radon_nikodym_cantor(const RadonMeasure& nu, const RadonMeasure& lambda) {
    auto purely_cantor = [](const RadonMeasure& m) {
        return m.closed_form() && ac_is_zero(m.ac()) && m.atoms().empty();
    };
    if (!purely_cantor(nu) || !purely_cantor(lambda))
        throw PreconditionError("radon_nikodym_cantor needs purely Cantor measures");
    CantorDensity out;
    for (const auto& l : lambda.cantor()) {
        if (l.coefficient < 0.0) throw PreconditionError("reference measure lambda must be nonnegative");
        out.bases.push_back(l.base);
        out.values.push_back(0.0);
    }
    for (const auto& n : nu.cantor()) {
        auto it = std::find(out.bases.begin(), out.bases.end(), n.base);
        if (it == out.bases.end())
            throw PreconditionError("absolute-continuity violation: " + n.base.id() + " is not a base of lambda");
        const auto idx = static_cast<std::size_t>(it - out.bases.begin());
        const double lc = lambda.cantor()[idx].coefficient;
        if (lc == 0.0)
            throw PreconditionError("absolute-continuity violation: lambda has zero mass on " + n.base.id());
        out.values[idx] = n.coefficient / lc;
    }
    return out;
}

double mollifier(double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    const double s = 1.0 - t * t;
    return 0.9375 * s * s;
}

double mollifier_derivative(double t) {
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return -3.75 * t * (1.0 - t * t);
}

double mollifier_cdf(double t) {
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double t3 = t * t * t;
    return 0.9375 * (t - 2.0 * t3 / 3.0 + t3 * t * t / 5.0 + 8.0 / 15.0);
}

double mollified_measure_eval(const RadonMeasure& mu, double eps, double x, double tol) {
    if (!(eps > 0.0)) throw PreconditionError("mollification radius must be positive");
    if (!(x - eps > mu.domain().a && x + eps < mu.domain().b))
        throw DomainError("mollification window leaves the domain");
    Integrand k;
    k.fn = [x, eps](double y) { return mollifier((x - y) / eps) / eps; };
    k.breaks = {x - eps, x, x + eps};
    k.support_lo = x - eps;
    k.support_hi = x + eps;
    return integrate_measure(k, mu, tol);
}

}  // namespace bvcalc
