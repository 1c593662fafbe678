#include "bvcalc/bv_ops.hpp"

#include <algorithm>
#include <cmath>

#include "bvcalc/errors.hpp"

namespace bvcalc {

RadonMeasure derivative(const BVFunction& u) {
    RadonMeasure m(u.domain());
    m.add_ac(u.smooth().derivative());
    for (double x : u.jump_set()) m.add_atom(x, u.jump(x));
    for (const auto& c : u.cantor()) m.add_cantor(c.base, c.coefficient);
    return m;
}

double total_variation(const BVFunction& u) { return measure_total_variation(derivative(u)); }

double pointwise_variation(const BVFunction& u, std::span<const double> partition) {
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (!u.domain().contains_open(partition[i])) throw PreconditionError("partition point outside the domain");
        if (i > 0 && !(partition[i] > partition[i - 1]))
            throw PreconditionError("partition must be strictly increasing");
    }
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < partition.size(); ++i) s += std::abs(u.eval(partition[i + 1]) - u.eval(partition[i]));
    return s;
}

double mollify(const BVFunction& u, double eps, double x, double tol) {
    if (!(eps > 0.0)) throw PreconditionError("mollification radius must be positive");
    if (!(x - eps > u.domain().a && x + eps < u.domain().b)) throw DomainError("mollification window leaves the domain");
    Integrand g = product(u.integrand(Side::precise), [x, eps](double y) { return mollifier((x - y) / eps) / eps; });
    g.breaks.insert(g.breaks.end(), {x - eps, x, x + eps});
    sort_unique(g.breaks);
    g.support_lo = x - eps;
    g.support_hi = x + eps;
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate_lebesgue(g, x - eps, x + eps, opt);
}

RadonMeasure leibniz_product(const BVFunction& v, const BVFunction& w) {
    if (!(v.domain() == w.domain())) throw PreconditionError("factors live on different domains");
    for (const auto& bv : v.cantor_bases())
        for (const auto& bw : w.cantor_bases()) {
            if (bv == bw)
                throw RepresentationError("product of two Cantor summands on " + bv.id() + " is not representable");
            if (!bv.support.disjoint_closed(bw.support))
                throw RepresentationError("Cantor bases " + bv.id() + " and " + bw.id() + " are incompatible");
        }

    RadonMeasure m(v.domain());
    m.add_ac((v.smooth() * w.smooth()).derivative());

    // Continuous Cantor summands of one factor times the density of the other.
    auto cantor_times_density = [&m](const BVFunction& c, const BVFunction& s) {
        if (!c.has_cantor()) return;
        const PiecewisePolynomial ds = s.smooth().derivative();
        Integrand g;
        g.fn = [c, ds](double x) { return c.cantor_value(x) * ds(x); };
        g.breaks = s.breakpoints();
        for (const auto& comp : c.cantor()) g.cantor_supports.push_back(comp.base.support);
        m.add_density(std::move(g));
    };
    cantor_times_density(v, w);
    cantor_times_density(w, v);

    std::vector<double> jumps = v.jump_set();
    const auto jw = w.jump_set();
    jumps.insert(jumps.end(), jw.begin(), jw.end());
    sort_unique(jumps);
    for (double x : jumps) m.add_atom(x, v.precise(x) * w.jump(x) + w.precise(x) * v.jump(x));

    for (const auto& c : v.cantor()) m.add_weighted_cantor(c.base, w.integrand(Side::precise), c.coefficient);
    for (const auto& c : w.cantor()) m.add_weighted_cantor(c.base, v.integrand(Side::precise), c.coefficient);
    return m;
}

Integrand product_integrand(const BVFunction& v, const BVFunction& w) {
    return product(v.integrand(Side::precise), w.integrand(Side::precise));
}

double coarea_lhs(const Integrand& g, const BVFunction& u, double tol) {
    QuadratureOptions opt;
    opt.tol = tol;
    return integrate_measure(g, variation_measure(derivative(u)), opt);
}

namespace {

// Solves p(x) + shift = t for x in [lo, hi], p monotone there.
double invert_monotone(const Polynomial& p, const Polynomial& dp, double shift, double t, double lo, double hi) {
    double flo = p(lo) + shift - t;
    double fhi = p(hi) + shift - t;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return std::abs(flo) < std::abs(fhi) ? lo : hi;
    double x = lo + (hi - lo) * flo / (flo - fhi);
    for (int it = 0; it < 100; ++it) {
        const double fx = p(x) + shift - t;
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = dp(x);
        double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * (1.0 + std::abs(x)) || hi - lo <= 1e-16 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

struct LevelIntegrator {
    const Integrand& g;
    double tol;

    double value(double x) const {
        const double v = g.fn(x);
        if (!std::isfinite(v)) throw QuadratureError("coarea integrand is not finite");
        return v;
    }

    // int over t of g(x(t)) where p(x) + shift = t on [lo, hi].
    double smooth_piece(const Polynomial& p, const Polynomial& dp, double shift, double lo, double hi,
                        double share) const {
        if (!(hi > lo)) return 0.0;
        const double tlo = p(lo) + shift;
        const double thi = p(hi) + shift;
        if (tlo == thi) return 0.0;
        auto h = [&](double t) { return value(invert_monotone(p, dp, shift, t, lo, hi)); };
        const double ta = std::min(tlo, thi), tb = std::max(tlo, thi);
        std::vector<double> tcuts{ta, tb};
        for (double b : g.breaks)
            if (b > lo && b < hi) tcuts.push_back(p(b) + shift);
        sort_unique(tcuts);
        double s = 0.0;
        QuadratureOptions opt;
        for (std::size_t i = 0; i + 1 < tcuts.size(); ++i) {
            opt.tol = std::max(share * (tcuts[i + 1] - tcuts[i]) / (tb - ta), 1e-17);
            s += adaptive_simpson(h, tcuts[i], tcuts[i + 1], opt);
        }
        return s;
    }

    double tiny_piece(const Polynomial& p, const Polynomial& dp, double shift, double lo, double hi) const {
        const double tlo = p(lo) + shift;
        const double thi = p(hi) + shift;
        if (tlo == thi) return 0.0;
        auto h = [&](double t) { return value(invert_monotone(p, dp, shift, t, lo, hi)); };
        return gauss3(h, std::min(tlo, thi), std::max(tlo, thi));
    }
};

// Level integral over a monotone segment [p, q] inside the Cantor support
// of `base`, where u = poly + coef * V_base + shift.
struct CantorLevels {
    const LevelIntegrator& li;
    const Polynomial& poly;
    const Polynomial& dpoly;
    double coef;
    double shift;
    double p, q;
    double support_length;
    int depth;
    int cap;
    double share;

    bool has_break_inside(double lo, double hi) const {
        const auto it = std::upper_bound(li.g.breaks.begin(), li.g.breaks.end(), lo);
        return it != li.g.breaks.end() && *it < hi;
    }

    double gap(double g0, double g1, double v) const {
        const double lo = std::max(g0, p), hi = std::min(g1, q);
        if (!(hi > lo)) return 0.0;
        const double s = shift + coef * v;
        if (hi - lo < support_length * 1.5e-3 && !has_break_inside(lo, hi)) return li.tiny_piece(poly, dpoly, s, lo, hi);
        return li.smooth_piece(poly, dpoly, s, lo, hi, share * (hi - lo) / (q - p));
    }

    // Cell [lo, lo + len] on which V runs from v to v + 2^-level.
    double cell(double lo, double len, double v, int level) const {
        const double hi = lo + len;
        const double ov_lo = std::max(lo, p), ov_hi = std::min(hi, q);
        if (!(ov_hi > ov_lo)) return 0.0;
        const double dv = std::ldexp(1.0, -level);
        const bool partial = lo < p || hi > q;
        const bool rough = has_break_inside(ov_lo, ov_hi);
        if (level >= depth && ((!partial && !rough) || level >= cap)) {
            // The whole level range of the cell, or the part inside [p, q].
            const double ulo = poly(ov_lo) + shift + coef * (lo < p ? cantor_function_eval((ov_lo - base_lo) / support_length) : v);
            const double uhi = poly(ov_hi) + shift + coef * (hi > q ? cantor_function_eval((ov_hi - base_lo) / support_length) : v + dv);
            return std::abs(uhi - ulo) * li.value(0.5 * (ov_lo + ov_hi));
        }
        const double third = len / 3.0;
        return cell(lo, third, v, level + 1) + gap(lo + third, lo + 2.0 * third, v + 0.5 * dv) +
               cell(lo + 2.0 * third, third, v + 0.5 * dv, level + 1);
    }

    double base_lo = 0.0;
};

}  // namespace

double coarea_rhs(const Integrand& g_in, const BVFunction& u, double tol) {
    Integrand g = g_in;
    sort_unique(g.breaks);
    const LevelIntegrator li{g, tol};
    const Interval& dom = u.domain();

    double total = 0.0;
    for (double x : u.jump_set()) total += li.value(x) * std::abs(u.jump(x));

    std::vector<double> cuts{dom.a, dom.b};
    const PiecewisePolynomial& sm = u.smooth();
    for (std::size_t i = 0; i < sm.piece_count(); ++i) {
        cuts.push_back(sm.breaks()[i]);
        for (double r : sm.pieces()[i].derivative().roots_in(sm.breaks()[i], sm.breaks()[i + 1])) cuts.push_back(r);
    }
    for (const auto& c : u.cantor()) {
        cuts.push_back(c.base.support.a);
        cuts.push_back(c.base.support.b);
    }
    std::erase_if(cuts, [&](double c) { return c < dom.a || c > dom.b; });
    sort_unique(cuts);

    const double share_unit = tol / (dom.b - dom.a);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i], q = cuts[i + 1];
        const double mid = 0.5 * (p + q);
        const Polynomial& poly = sm.pieces()[sm.locate(mid)];
        const Polynomial dpoly = poly.derivative();
        const int dir_poly = dpoly.is_zero() ? 0 : sign_of(dpoly(mid));

        const CantorComponent* active = nullptr;
        double shift = 0.0;
        for (const auto& c : u.cantor()) {
            if (c.base.support.a <= p && q <= c.base.support.b)
                active = &c;
            else
                shift += c.coefficient * c.base.cantor_function(mid);
        }
        const double share = share_unit * (q - p);
        if (active == nullptr) {
            if (dir_poly == 0) continue;
            total += li.smooth_piece(poly, dpoly, shift, p, q, share);
            continue;
        }
        if (dir_poly != 0 && dir_poly != sign_of(active->coefficient))
            throw RepresentationError("coarea_rhs: polynomial and Cantor parts have opposite monotonicity on [" +
                                      std::to_string(p) + ", " + std::to_string(q) + "]");
        const CantorBase& base = active->base;
        const double len = base.support.length();
        const double range = std::abs(active->coefficient) + std::abs(poly(q) - poly(p));
        int depth = static_cast<int>(std::ceil(std::log(std::max(len * range, 1e-300) / std::max(share, 1e-300)) / std::log(3.0)));
        depth = std::clamp(depth, 2, 20);
        CantorLevels cl{li, poly, dpoly, active->coefficient, shift, p, q, len, depth, depth + 24, share};
        cl.base_lo = base.support.a;
        total += cl.cell(base.support.a, len, 0.0, 0);
    }
    return total;
}

double integration_by_parts_residual(const BVFunction& u, const TestFunction& phi, double tol) {
    QuadratureOptions opt;
    opt.tol = tol;
    opt.lipschitz = std::max(phi.lipschitz(), 1e-12);
    const Integrand up = product(u.integrand(Side::precise), phi.derivative_integrand());
    const double a = integrate_lebesgue(up, u.domain().a, u.domain().b, opt);
    const double b = integrate_measure(phi.value_integrand(), derivative(u), opt);
    return a + b;
}

}  // namespace bvcalc
