#include "bvcalc/chain_rule.hpp"

#include <algorithm>
#include <cmath>

#include "bvcalc/bv_ops.hpp"
#include "bvcalc/errors.hpp"

namespace bvcalc {

namespace {

constexpr std::size_t max_dim = 10;
// Tolerance fed to the Cantor depth rule. The centre rule is second order,
// so this already leaves its error far below the requested tolerance.
constexpr double cantor_rule_tol = 1e-7;

using WBuf = std::array<double, max_dim>;

/// Shared quadrature setup for one (B, u, phi) evaluation.
class Setup {
public:
    Setup(const Interval& domain, const BVVector& u, const TestFunction& phi, double tol)
        : domain_(domain), u_(u), phi_(phi), tol_(tol) {
        if (u.dim() == 0 || u.dim() > max_dim) throw PreconditionError("u must have between 1 and 10 components");
        if (!(u.domain() == domain)) throw PreconditionError("u and the flux live on different domains");
        if (!(phi.support().a > domain.a && phi.support().b < domain.b))
            throw PreconditionError("test function support must lie inside the domain");
        add_function_breaks(u);
        breaks_.push_back(phi.support().a);
        breaks_.push_back(phi.support().b);
        for (const auto& c : u.components()) du_.push_back(c.smooth().derivative());
    }

    void add_function_breaks(const BVVector& f) {
        for (double x : f.breakpoints()) breaks_.push_back(x);
        for (const auto& b : f.cantor_bases()) add_support(b.support);
        sort_unique(breaks_);
    }
    void add_breaks(const std::vector<double>& xs) {
        breaks_.insert(breaks_.end(), xs.begin(), xs.end());
        sort_unique(breaks_);
    }
    void add_support(const Interval& s) {
        if (std::find(supports_.begin(), supports_.end(), s) == supports_.end()) supports_.push_back(s);
    }

    std::size_t dim() const { return u_.dim(); }
    const BVVector& u() const { return u_; }
    const TestFunction& phi() const { return phi_; }
    const PiecewisePolynomial& du(std::size_t i) const { return du_[i]; }

    std::span<const double> u_at(double x, WBuf& buf, Side side = Side::stored) const {
        u_.eval_into(x, side, std::span<double>(buf.data(), u_.dim()));
        return {buf.data(), u_.dim()};
    }

    Integrand integrand(std::function<double(double)> fn) const {
        Integrand g;
        g.fn = std::move(fn);
        g.breaks = breaks_;
        g.cantor_supports = supports_;
        g.support_lo = phi_.support().a;
        g.support_hi = phi_.support().b;
        return g;
    }

    double lebesgue(std::function<double(double)> fn) const {
        QuadratureOptions opt;
        opt.tol = tol_;
        return integrate_lebesgue(integrand(std::move(fn)), phi_.support().a, phi_.support().b, opt);
    }

    double cantor(std::function<double(double)> fn, const CantorBase& base) const {
        if (base.support.b <= phi_.support().a || base.support.a >= phi_.support().b) return 0.0;
        const double lip = phi_.lipschitz() + phi_.sup();
        const int depth = cantor_depth_for(std::max(tol_, cantor_rule_tol), lip, base.support.length());
        return integrate_cantor(integrand(std::move(fn)), base, depth);
    }

    /// Points of `xs` inside the open support of phi.
    std::vector<double> in_support(std::vector<double> xs) const {
        std::erase_if(xs, [&](double x) { return !(x > phi_.support().a && x < phi_.support().b); });
        sort_unique(xs);
        return xs;
    }

private:
    Interval domain_;
    const BVVector& u_;
    const TestFunction& phi_;
    double tol_;
    std::vector<double> breaks_;
    std::vector<Interval> supports_;
    std::vector<PiecewisePolynomial> du_;
};

Setup flux_setup(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    if (B.dim() != u.dim()) throw PreconditionError("flux and u disagree on the dimension");
    Setup s(B.domain(), u, phi, tol);
    s.add_breaks(B.breakpoints());
    for (const auto& b : B.cantor_bases()) s.add_support(b.support);
    return s;
}

/// Cantor coefficient of `base` in f (0 when absent).
double coefficient_on(const BVFunction& f, const CantorBase& base) {
    double c = 0.0;
    for (const auto& comp : f.cantor())
        if (comp.base == base) c += comp.coefficient;
    return c;
}

/// The weight g multiplies every diffuse integrand; g = nullptr means 1.
struct Diffuse {
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
};

Diffuse diffuse_terms(const FluxModel& B, const Setup& s, const BVFunction* g) {
    const auto& phi = s.phi();
    const std::size_t d = s.dim();
    auto weight = [g](double x) { return g ? g->eval(x) : 1.0; };
    Diffuse out;

    out.t1 = s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf;
        const auto w = s.u_at(x, buf);
        double v = 0.0;
        for (std::size_t k = 0; k < B.terms().size(); ++k) v += B.K_derivative(k)(x) * B.terms()[k].f(w);
        return p * weight(x) * v;
    });

    for (const auto& base : B.cantor_bases())
        out.t2 += s.cantor(
            [&](double x) {
                WBuf buf;
                const auto w = s.u_at(x, buf);
                double v = 0.0;
                for (std::size_t k = 0; k < B.terms().size(); ++k)
                    v += B.cantor_coefficient(k, base) * B.terms()[k].f(w);
                return phi(x) * weight(x) * v;
            },
            base);

    // D_w B(x, w) . e with e = grad u (T3) or the Cantor coefficients (T4).
    auto dwb_dot = [&](double x, std::span<const double> w, const double* e) {
        double v = 0.0;
        for (const auto& t : B.terms()) {
            double gk = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                if (e[i] != 0.0) gk += t.f.partial(w, i) * e[i];
            if (gk != 0.0) v += t.K.eval(x) * gk;
        }
        return v;
    };

    out.t3 = s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf, e;
        const auto w = s.u_at(x, buf);
        for (std::size_t i = 0; i < d; ++i) e[i] = s.du(i)(x);
        return p * weight(x) * dwb_dot(x, w, e.data());
    });

    for (const auto& base : s.u().cantor_bases()) {
        WBuf c{};
        for (std::size_t i = 0; i < d; ++i) c[i] = coefficient_on(s.u()[i], base);
        out.t4 += s.cantor(
            [&, c](double x) {
                WBuf buf;
                const auto w = s.u_at(x, buf);
                return phi(x) * weight(x) * dwb_dot(x, w, c.data());
            },
            base);
    }
    return out;
}

double one_sided_flux(const FluxModel& B, const BVVector& u, double x, Side side) {
    WBuf buf;
    u.eval_into(x, side, std::span<double>(buf.data(), u.dim()));
    return B.eval(x, std::span<const double>(buf.data(), u.dim()), side);
}

std::vector<double> jump_points(const FluxModel& B, const BVVector& u) {
    std::vector<double> pts = B.jump_set();
    const auto ju = u.jump_set();
    pts.insert(pts.end(), ju.begin(), ju.end());
    sort_unique(pts);
    return pts;
}

double lhs_integral(const Setup& s, const std::function<double(double, std::span<const double>)>& v) {
    return s.lebesgue([&](double x) {
        const double dp = s.phi().derivative(x);
        if (dp == 0.0) return 0.0;
        WBuf buf;
        return dp * v(x, s.u_at(x, buf));
    });
}

}  // namespace

double chainrule_lhs(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    const Setup s = flux_setup(B, u, phi, tol);
    return lhs_integral(s, [&](double x, std::span<const double> w) { return B.eval(x, w); });
}

ChainRuleReport chainrule_terms(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    const Setup s = flux_setup(B, u, phi, tol);
    ChainRuleReport r;
    r.lhs = lhs_integral(s, [&](double x, std::span<const double> w) { return B.eval(x, w); });
    const Diffuse dt = diffuse_terms(B, s, nullptr);
    r.terms[0] = dt.t1;
    r.terms[1] = dt.t2;
    r.terms[2] = dt.t3;
    r.terms[3] = dt.t4;
    for (double x : s.in_support(jump_points(B, u)))
        r.terms[4] += phi(x) * (one_sided_flux(B, u, x, Side::right) - one_sided_flux(B, u, x, Side::left));
    r.residual = r.lhs + r.total();
    r.lambda_vacuous = !B.has_cantor();
    return r;
}

StarForm chainrule_star_parts(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    const Setup s = flux_setup(B, u, phi, tol);
    const Diffuse dt = diffuse_terms(B, s, nullptr);
    StarForm f;
    f.diffuse = dt.t1 + dt.t2 + dt.t3 + dt.t4;
    for (double x : s.in_support(B.jump_set())) {
        WBuf up, um;
        const auto wp = s.u_at(x, up, Side::right);
        const auto wm = s.u_at(x, um, Side::left);
        const double plus = 0.5 * (B.eval(x, wp, Side::right) + B.eval(x, wm, Side::right));
        const double minus = 0.5 * (B.eval(x, wp, Side::left) + B.eval(x, wm, Side::left));
        f.n_sum += phi(x) * (plus - minus);
    }
    for (double x : s.in_support(u.jump_set())) {
        WBuf up, um;
        const auto wp = s.u_at(x, up, Side::right);
        const auto wm = s.u_at(x, um, Side::left);
        f.j_sum += phi(x) * (B.eval(x, wp, Side::precise) - B.eval(x, wm, Side::precise));
    }
    return f;
}

double chainrule_star_form(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    return chainrule_star_parts(B, u, phi, tol).total();
}

std::pair<double, double> weighted_chainrule(const FluxModel& B, const BVVector& u, const BVFunction& g,
                                             const TestFunction& phi, double tol) {
    if (!(g.domain() == B.domain())) throw PreconditionError("weight lives on a different domain");
    for (double x : g.jump_set())
        if (!std::binary_search(B.jump_set().begin(), B.jump_set().end(), x))
            throw PreconditionError("the jump set of the weight must lie in the jump set of K");
    Setup s = flux_setup(B, u, phi, tol);
    s.add_function_breaks(BVVector(g));

    // Product route: g* Dv = D(g v) - v* Dg.
    auto v = [&](double x, std::span<const double> w) { return B.eval(x, w); };
    double pairing = -lhs_integral(s, [&](double x, std::span<const double> w) { return g.eval(x) * v(x, w); });
    const PiecewisePolynomial dg = g.smooth().derivative();
    pairing -= s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf;
        return p * dg(x) * v(x, s.u_at(x, buf));
    });
    for (const auto& c : g.cantor())
        pairing -= c.coefficient * s.cantor(
                                       [&](double x) {
                                           WBuf buf;
                                           return phi(x) * v(x, s.u_at(x, buf));
                                       },
                                       c.base);
    for (double x : s.in_support(g.jump_set())) {
        const double vstar = 0.5 * (one_sided_flux(B, u, x, Side::right) + one_sided_flux(B, u, x, Side::left));
        pairing -= phi(x) * vstar * g.jump(x);
    }

    const Diffuse dt = diffuse_terms(B, s, &g);
    double rhs = dt.t1 + dt.t2 + dt.t3 + dt.t4;
    for (double x : s.in_support(jump_points(B, u)))
        rhs += phi(x) * g.precise(x) * (one_sided_flux(B, u, x, Side::right) - one_sided_flux(B, u, x, Side::left));
    return {pairing, rhs};
}

ChainRuleReport corollary_KF(const BVFunction& K, const SmoothFunction& f, const BVVector& u,
                             const TestFunction& phi, double tol) {
    if (f.dim() != u.dim()) throw PreconditionError("f and u disagree on the dimension");
    Setup s(K.domain(), u, phi, tol);
    s.add_function_breaks(BVVector(K));
    const std::size_t d = u.dim();
    const PiecewisePolynomial dK = K.smooth().derivative();
    ChainRuleReport r;
    r.lhs = lhs_integral(s, [&](double x, std::span<const double> w) { return K.eval(x) * f(w); });

    r.terms[0] = s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf;
        return p * f(s.u_at(x, buf)) * dK(x);
    });
    for (const auto& c : K.cantor())
        r.terms[1] += c.coefficient * s.cantor(
                                          [&](double x) {
                                              WBuf buf;
                                              return phi(x) * f(s.u_at(x, buf));
                                          },
                                          c.base);
    r.terms[2] = s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf;
        const auto w = s.u_at(x, buf);
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double dui = s.du(i)(x);
            if (dui != 0.0) dot += f.partial(w, i) * dui;
        }
        return p * K.eval(x) * dot;
    });
    for (const auto& base : u.cantor_bases()) {
        WBuf c{};
        for (std::size_t i = 0; i < d; ++i) c[i] = coefficient_on(u[i], base);
        r.terms[3] += s.cantor(
            [&, c](double x) {
                WBuf buf;
                const auto w = s.u_at(x, buf);
                double dot = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    if (c[i] != 0.0) dot += f.partial(w, i) * c[i];
                return phi(x) * K.eval(x) * dot;
            },
            base);
    }
    for (double x : s.in_support(K.jump_set())) {
        WBuf up, um;
        const double fstar = 0.5 * (f(s.u_at(x, up, Side::right)) + f(s.u_at(x, um, Side::left)));
        r.terms[4] += phi(x) * fstar * K.jump(x);
    }
    for (double x : s.in_support(u.jump_set())) {
        WBuf up, um;
        r.terms[4] += phi(x) * K.precise(x) * (f(s.u_at(x, up, Side::right)) - f(s.u_at(x, um, Side::left)));
    }
    r.residual = r.lhs + r.total();
    r.lambda_vacuous = !K.has_cantor();
    return r;
}

namespace {

Setup composite_setup(const SmoothFunction& f2, const BVFunction& K, const BVVector& u, const TestFunction& phi,
                      double tol) {
    if (f2.dim() != u.dim() + 1) throw PreconditionError("f2 takes (y, w) with w of the dimension of u");
    Setup s(K.domain(), u, phi, tol);
    s.add_function_breaks(BVVector(K));
    return s;
}

/// (K(x), u(x)) packed for f2.
std::span<const double> yw_at(const Setup& s, const BVFunction& K, double x, WBuf& buf, Side side = Side::stored) {
    buf[0] = K.eval(x, side);
    s.u().eval_into(x, side, std::span<double>(buf.data() + 1, s.dim()));
    return {buf.data(), s.dim() + 1};
}

}  // namespace

double composite_lhs(const SmoothFunction& f2, const BVFunction& K, const BVVector& u, const TestFunction& phi,
                     double tol) {
    if (u.dim() + 1 > max_dim) throw PreconditionError("too many components");
    const Setup s = composite_setup(f2, K, u, phi, tol);
    return s.lebesgue([&](double x) {
        const double dp = phi.derivative(x);
        if (dp == 0.0) return 0.0;
        WBuf buf;
        return dp * f2(yw_at(s, K, x, buf));
    });
}

double corollary_fK(const SmoothFunction& f2, const BVFunction& K, const BVVector& u, const TestFunction& phi,
                    double tol) {
    if (u.dim() + 1 > max_dim) throw PreconditionError("too many components");
    const Setup s = composite_setup(f2, K, u, phi, tol);
    const std::size_t d = u.dim();
    const PiecewisePolynomial dK = K.smooth().derivative();

    // Diffuse part of DK and Du as (ac density, Cantor coefficients) per slot
    // of f2: slot 0 is y = K, slot i + 1 is w_i = u_i.
    double total = s.lebesgue([&](double x) {
        const double p = phi(x);
        if (p == 0.0) return 0.0;
        WBuf buf;
        const auto yw = yw_at(s, K, x, buf);
        double v = f2.partial(yw, 0) * dK(x);
        for (std::size_t i = 0; i < d; ++i) {
            const double dui = s.du(i)(x);
            if (dui != 0.0) v += f2.partial(yw, i + 1) * dui;
        }
        return p * v;
    });
    std::vector<CantorBase> bases = K.cantor_bases();
    for (const auto& b : u.cantor_bases())
        if (std::find(bases.begin(), bases.end(), b) == bases.end()) bases.push_back(b);
    for (const auto& base : bases) {
        WBuf c{};
        c[0] = coefficient_on(K, base);
        for (std::size_t i = 0; i < d; ++i) c[i + 1] = coefficient_on(u[i], base);
        total += s.cantor(
            [&, c](double x) {
                WBuf buf;
                const auto yw = yw_at(s, K, x, buf);
                double v = 0.0;
                for (std::size_t i = 0; i <= d; ++i)
                    if (c[i] != 0.0) v += f2.partial(yw, i) * c[i];
                return phi(x) * v;
            },
            base);
    }
    std::vector<double> pts = K.jump_set();
    const auto ju = u.jump_set();
    pts.insert(pts.end(), ju.begin(), ju.end());
    for (double x : s.in_support(pts)) {
        WBuf p, m;
        total += phi(x) * (f2(yw_at(s, K, x, p, Side::right)) - f2(yw_at(s, K, x, m, Side::left)));
    }
    return total;
}

std::pair<double, double> volpert_comparison_pwc(const FluxModel& B, const PiecewiseConstant& u,
                                                 const TestFunction& phi, double tol) {
    if (B.dim() != 1) throw PreconditionError("the level-set comparison needs scalar u");
    if (!(u.domain() == B.domain())) throw PreconditionError("u and the flux live on different domains");
    {
        const Interval& dom = B.domain();
        const double zero = 0.0;
        std::vector<double> probes = B.breakpoints();
        for (int i = 1; i < 256; ++i) probes.push_back(dom.a + dom.length() * i / 256.0);
        for (double x : probes)
            for (Side side : {Side::left, Side::right})
                if (std::abs(B.eval(x, std::span<const double>(&zero, 1), side)) > 1e-12)
                    throw PreconditionError("the level-set comparison needs B(x, 0) = 0");
    }
    const BVFunction ubv = u.to_bv();
    const BVVector uv(ubv);
    const Setup s = flux_setup(B, uv, phi, tol);
    const auto& a = u.partition();
    const auto& vals = u.values();
    const std::size_t cells = u.cells();
    const std::size_t nterms = B.terms().size();

    // Level-set route. m[k][i] = int over the open cell i of phi dDK_k,
    // node[k][j] = phi(a_j) [K_k](a_j) at interior node j.
    std::vector<std::vector<double>> m(nterms, std::vector<double>(cells)), node(nterms, std::vector<double>(cells - 1));
    QuadratureOptions opt;
    opt.tol = tol;
    opt.cantor_depth =
        cantor_depth_for(std::max(tol, cantor_rule_tol), phi.lipschitz() + phi.sup(), B.domain().length());
    for (std::size_t k = 0; k < nterms; ++k) {
        const RadonMeasure dK = derivative(B.terms()[k].K);
        for (std::size_t i = 0; i < cells; ++i) {
            const double lo = a[i], hi = a[i + 1];
            if (hi <= phi.support().a || lo >= phi.support().b) continue;
            Integrand g = s.integrand([&, lo, hi](double x) { return x > lo && x < hi ? phi(x) : 0.0; });
            m[k][i] = integrate_measure(g, dK, opt);
        }
        for (std::size_t j = 0; j + 1 < cells; ++j) node[k][j] = phi(a[j + 1]) * B.terms()[k].K.jump(a[j + 1]);
    }
    auto chi = [](double t, double v) { return (t >= std::min(0.0, v) && t <= std::max(0.0, v)) ? 1.0 : 0.0; };
    auto level = [&](double t) {
        const double sg = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
        if (sg == 0.0) return 0.0;
        double total = 0.0;
        for (std::size_t k = 0; k < nterms; ++k) {
            double inner = 0.0;
            for (std::size_t i = 0; i < cells; ++i)
                if (m[k][i] != 0.0) inner += chi(t, vals[i]) * m[k][i];
            for (std::size_t j = 0; j + 1 < cells; ++j)
                if (node[k][j] != 0.0) inner += 0.5 * (chi(t, vals[j]) + chi(t, vals[j + 1])) * node[k][j];
            if (inner != 0.0) inner *= B.terms()[k].f.derivative(t);
            total += inner;
        }
        return sg * total;
    };
    std::vector<double> levels(vals.begin(), vals.end());
    levels.push_back(0.0);
    sort_unique(levels);
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) left += adaptive_simpson(level, levels[i], levels[i + 1], opt);

    // Cell route: int phi chi*_cell dDK = phi K* at the ends minus int phi' K.
    double right = 0.0;
    for (std::size_t k = 0; k < nterms; ++k) {
        const BVFunction& K = B.terms()[k].K;
        for (std::size_t i = 0; i < cells; ++i) {
            const double lo = std::max(a[i], phi.support().a), hi = std::min(a[i + 1], phi.support().b);
            if (!(lo < hi)) continue;
            Integrand g = s.integrand([&](double x) { return phi.derivative(x) * K.eval(x); });
            double cell = -integrate_lebesgue(g, lo, hi, opt);
            if (i > 0) cell -= phi(a[i]) * K.precise(a[i]);
            if (i + 1 < cells) cell += phi(a[i + 1]) * K.precise(a[i + 1]);
            right += B.terms()[k].f(vals[i]) * cell;
        }
    }
    return {left, right};
}

std::pair<double, double> step_function_consistency(const FluxModel& B, const BVVector& u,
                                                    const TestFunction& phi, double tol) {
    for (const auto& c : u.components()) {
        if (c.has_cantor()) throw PreconditionError("u must be piecewise constant");
        for (const auto& p : c.smooth().pieces())
            if (p.degree() > 0) throw PreconditionError("u must be piecewise constant");
    }
    const ChainRuleReport r = chainrule_terms(B, u, phi, tol);
    const Setup s = flux_setup(B, u, phi, tol);
    const std::size_t d = u.dim();

    // Cells between consecutive jumps of u, with their frozen values.
    const auto J = u.jump_set();
    std::vector<double> a{B.domain().a};
    a.insert(a.end(), J.begin(), J.end());
    a.push_back(B.domain().b);
    std::vector<WBuf> v(a.size() - 1);
    for (std::size_t i = 0; i + 1 < a.size(); ++i) s.u_at(0.5 * (a[i] + a[i + 1]), v[i]);
    auto frozen = [&](std::size_t i) { return std::span<const double>(v[i].data(), d); };

    double rhs = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double lo = a[i], hi = a[i + 1];
        rhs += s.lebesgue([&, i, lo, hi](double x) {
            if (!(x > lo && x < hi)) return 0.0;
            double g = 0.0;
            for (std::size_t k = 0; k < B.terms().size(); ++k) g += B.K_derivative(k)(x) * B.terms()[k].f(frozen(i));
            return phi(x) * g;
        });
        for (const auto& base : B.cantor_bases()) {
            double psi_lambda = 0.0;
            for (std::size_t k = 0; k < B.terms().size(); ++k)
                psi_lambda += B.cantor_coefficient(k, base) * B.terms()[k].f(frozen(i));
            if (psi_lambda == 0.0) continue;
            rhs += psi_lambda * s.cantor([&, lo, hi](double x) { return x > lo && x < hi ? phi(x) : 0.0; }, base);
        }
    }
    // Jumps of u: averaged one-sided differences of B plus B* differences.
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        const double x = a[i];
        const auto wp = frozen(i), wm = frozen(i - 1);
        const double avg = 0.5 * (B.eval(x, wp, Side::right) + B.eval(x, wm, Side::right)) -
                           0.5 * (B.eval(x, wp, Side::left) + B.eval(x, wm, Side::left));
        const double star = B.eval(x, wp, Side::precise) - B.eval(x, wm, Side::precise);
        rhs += phi(x) * (avg + star);
    }
    // Points of N where u is continuous.
    for (double x : B.jump_set()) {
        if (std::binary_search(J.begin(), J.end(), x)) continue;
        const std::size_t i =
            static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) - 1;
        rhs += phi(x) * (B.eval(x, frozen(i), Side::right) - B.eval(x, frozen(i), Side::left));
    }
    return {r.terms[0] + r.terms[1] + r.terms[4], rhs};
}

double verify_chainrule(const FluxModel& B, const BVVector& u, const TestFunction& phi, double tol) {
    return std::abs(chainrule_terms(B, u, phi, tol).residual);
}

}  // namespace bvcalc
