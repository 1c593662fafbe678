#include "bvcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bvcalc/errors.hpp"

namespace bvcalc {

namespace {

struct SimpsonContext {
    const std::function<double(double)>& fn;
    const QuadratureOptions& opt;
    long long evaluations = 0;
    double unconverged = 0.0;

    double operator()(double x) {
        if (++evaluations > opt.max_evaluations)
            throw QuadratureError("quadrature exceeded the configured evaluation budget");
        const double v = fn(x);
        if (!std::isfinite(v))
            throw QuadratureError("integrand is not finite at x = " + std::to_string(x));
        return v;
    }
};

double simpson_rec(SimpsonContext& ctx, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if (!(lm > a && m > lm && rm > m && b > rm)) return whole;
    const double flm = ctx(lm);
    const double frm = ctx(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= roundoff) return left + right + delta / 15.0;
    if (depth >= ctx.opt.max_depth) {
        ctx.unconverged += std::abs(delta);
        return left + right + delta / 15.0;
    }
    return simpson_rec(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

Integrand product(const Integrand& f, const Integrand& g) {
    Integrand out;
    out.fn = [ff = f.fn, gf = g.fn](double x) {
        const double a = ff(x);
        return a == 0.0 ? 0.0 : a * gf(x);
    };
    out.breaks = f.breaks;
    out.breaks.insert(out.breaks.end(), g.breaks.begin(), g.breaks.end());
    sort_unique(out.breaks);
    out.cantor_supports = f.cantor_supports;
    for (const Interval& s : g.cantor_supports)
        if (std::find(out.cantor_supports.begin(), out.cantor_supports.end(), s) == out.cantor_supports.end())
            out.cantor_supports.push_back(s);
    out.support_lo = std::max(f.support_lo, g.support_lo);
    out.support_hi = std::min(f.support_hi, g.support_hi);
    return out;
}

Integrand product(const Integrand& f, std::function<double(double)> g) {
    Integrand out = f;
    out.fn = [ff = f.fn, gf = std::move(g)](double x) {
        const double a = ff(x);
        return a == 0.0 ? 0.0 : a * gf(x);
    };
    return out;
}

double gauss3(const std::function<double(double)>& fn, double lo, double hi) {
    static const double node = std::sqrt(0.6);
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    return h * (5.0 * fn(c - h * node) + 8.0 * fn(c) + 5.0 * fn(c + h * node)) / 9.0;
}

double adaptive_simpson(const std::function<double(double)>& fn, double lo, double hi,
                        const QuadratureOptions& opt) {
    if (!(hi > lo)) return 0.0;
    SimpsonContext ctx{fn, opt};
    // Four initial panels guard against aliasing of localized integrands.
    constexpr int panels = 4;
    const double h = (hi - lo) / panels;
    double total = 0.0;
    double fa = ctx(lo);
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double b = (p + 1 == panels) ? hi : lo + (p + 1) * h;
        const double m = 0.5 * (a + b);
        const double fm = ctx(m);
        const double fb = ctx(b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_rec(ctx, a, b, fa, fm, fb, whole, opt.tol / panels, 0);
        fa = fb;
    }
    if (ctx.unconverged > opt.tol)
        throw QuadratureError("adaptive quadrature could not reach tol " + std::to_string(opt.tol) +
                              " within the subdivision limit");
    return total;
}

namespace {

// Lebesgue integral of fn over the window [p, q] inside the Cantor support S.
// Gaps of the ternary construction carry no Cantor-function variation and
// are integrated as smooth pieces; the level-d residual cells use their
// centre value, which is second order because the Cantor function is odd
// about the centre of every cell.
struct CantorWindow {
    const std::function<double(double)>& fn;
    const QuadratureOptions& opt;
    double p, q;
    double tol;
    double support_length;
    int depth;
    int depth_cap;

    double gap(double g0, double g1) const {
        const double lo = std::max(g0, p);
        const double hi = std::min(g1, q);
        if (!(hi > lo)) return 0.0;
        if (hi - lo < support_length * 1.5e-3) return gauss3(fn, lo, hi);
        QuadratureOptions o = opt;
        o.tol = std::max(tol * (hi - lo) / (q - p), 1e-16);
        return adaptive_simpson(fn, lo, hi, o);
    }

    double cell(double lo, double len, int level) const {
        const double hi = lo + len;
        const double ov_lo = std::max(lo, p);
        const double ov_hi = std::min(hi, q);
        if (!(ov_hi > ov_lo)) return 0.0;
        const bool partial = lo < p || hi > q;
        if (level >= depth && (!partial || level >= depth_cap)) {
            const double v = fn(0.5 * (ov_lo + ov_hi));
            if (!std::isfinite(v)) throw QuadratureError("integrand is not finite on a Cantor support");
            return v * (ov_hi - ov_lo);
        }
        const double third = len / 3.0;
        return cell(lo, third, level + 1) + gap(lo + third, lo + 2.0 * third) +
               cell(lo + 2.0 * third, third, level + 1);
    }
};

}  // namespace

double integrate_lebesgue(const Integrand& f, double lo, double hi, const QuadratureOptions& opt) {
    lo = std::max(lo, f.support_lo);
    hi = std::min(hi, f.support_hi);
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts{lo, hi};
    for (double b : f.breaks)
        if (b > lo && b < hi) cuts.push_back(b);
    for (const Interval& s : f.cantor_supports) {
        if (s.a > lo && s.a < hi) cuts.push_back(s.a);
        if (s.b > lo && s.b < hi) cuts.push_back(s.b);
    }
    sort_unique(cuts);

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i];
        const double q = cuts[i + 1];
        const double share = opt.tol * (q - p) / (hi - lo);
        const Interval* host = nullptr;
        for (const Interval& s : f.cantor_supports)
            if (s.a <= p && q <= s.b && (host == nullptr || s.length() < host->length())) host = &s;
        if (host == nullptr) {
            QuadratureOptions o = opt;
            o.tol = share;
            total += adaptive_simpson(f.fn, p, q, o);
            continue;
        }
        const double len = host->length();
        int depth = static_cast<int>(std::ceil(std::log(len / std::max(share, 1e-300)) / std::log(6.0))) + 2;
        depth = std::clamp(depth, 2, 20);
        CantorWindow w{f.fn, opt, p, q, share, len, depth, depth + 12};
        total += w.cell(host->a, len, 0);
    }
    return total;
}

}  // namespace bvcalc
