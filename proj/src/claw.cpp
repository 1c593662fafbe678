#include "bvcalc/claw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

#include "bvcalc/errors.hpp"
#include "bvcalc/quadrature.hpp"

namespace bvcalc {

namespace {

constexpr int x_samples = 257;

/// Interior x samples plus both sides of every breakpoint of K.
std::vector<std::pair<double, Side>> flux_probes(const FluxModel& B) {
    const Interval& dom = B.domain();
    std::vector<std::pair<double, Side>> probes;
    for (int i = 0; i < x_samples; ++i) probes.emplace_back(dom.a + dom.length() * (i + 0.5) / x_samples, Side::stored);
    for (double x : B.breakpoints()) {
        probes.emplace_back(x, Side::left);
        probes.emplace_back(x, Side::right);
    }
    probes.emplace_back(dom.a, Side::right);
    probes.emplace_back(dom.b, Side::left);
    return probes;
}

bool on_jump(const FluxModel& B, double x) {
    return std::binary_search(B.jump_set().begin(), B.jump_set().end(), x);
}

// Five-point Gauss-Legendre on [-1, 1].
constexpr double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
constexpr double gl_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                            0.2369268850561891};

}  // namespace

ScalarFlux::ScalarFlux(FluxModel B, Bounds working_range, int samples) : B_(std::move(B)), range_(working_range) {
    if (B_.dim() != 1) throw PreconditionError("a scalar flux needs d = 1");
    if (!(range_.lo < range_.hi)) throw PreconditionError("working range must be a nonempty interval");
    if (samples < 2) throw PreconditionError("monotonicity check needs at least two samples");
    int sign = 0;
    for (const auto& [x, side] : flux_probes(B_)) {
        for (int k = 0; k < samples; ++k) {
            const double w = range_.lo + (range_.hi - range_.lo) * (k + 0.5) / samples;
            const double d = dw(x, w, side);
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign))
                throw PreconditionError("flux is not strictly monotone in w on the working range (x = " +
                                        std::to_string(x) + ", w = " + std::to_string(w) + ")");
            sign = s;
            speed_ = std::max(speed_, std::abs(d));
        }
        bound_ = std::max({bound_, std::abs((*this)(x, range_.lo, side)), std::abs((*this)(x, range_.hi, side))});
    }
    orientation_ = sign;
}

double ScalarFlux::operator()(double x, double w, Side side) const { return B_.eval(x, {&w, 1}, side); }

double ScalarFlux::dw(double x, double w, Side side) const {
    double s = 0.0;
    for (const auto& t : B_.terms()) s += t.K.eval(x, side) * t.f.derivative(w);
    return s;
}

Bounds ScalarFlux::attained(double x, Side side) const {
    const double a = (*this)(x, range_.lo, side), b = (*this)(x, range_.hi, side);
    return {std::min(a, b), std::max(a, b)};
}

double c_alpha(const ScalarFlux& flux, double x, double alpha, Side side, double tol) {
    const Bounds r = flux.attained(x, side);
    if (!(alpha >= r.lo && alpha <= r.hi))
        throw RangeError("level " + std::to_string(alpha) + " is not attained by B(" + std::to_string(x) + ", .)");
    double lo = flux.range().lo, hi = flux.range().hi;
    const double o = flux.orientation();
    if (flux(x, lo, side) == alpha) return lo;
    if (flux(x, hi, side) == alpha) return hi;
    for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g = o * (flux(x, mid, side) - alpha);
        if (g == 0.0) return mid;
        (g < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool is_rankine_hugoniot(const ScalarFlux& flux, double x, double u_minus, double u_plus, double tol) {
    return std::abs(flux(x, u_minus, Side::left) - flux(x, u_plus, Side::right)) <= tol;
}

std::vector<double> adapted_levels(const ScalarFlux& flux, int count) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (const auto& [x, side] : flux_probes(flux.model())) {
        const Bounds r = flux.attained(x, side);
        lo = std::max(lo, r.lo);
        hi = std::min(hi, r.hi);
    }
    if (!(lo < hi)) throw RangeError("no level is attained at every x");
    std::vector<double> levels;
    for (int k = 1; k <= count; ++k) levels.push_back(lo + (hi - lo) * k / (count + 1));
    return levels;
}

EntropyFluxPair adapted_entropy_pair(const ScalarFlux& flux, double alpha) {
    for (const auto& [x, side] : flux_probes(flux.model())) c_alpha(flux, x, alpha, side);
    auto f = std::make_shared<const ScalarFlux>(flux);
    EntropyFluxPair p;
    p.label = "adapted(" + std::to_string(alpha) + ")";
    p.section = [f, alpha](double x, Side side) {
        const double c = c_alpha(*f, x, alpha, side);
        EntropySection s;
        s.eta = [c](double u) { return std::abs(u - c); };
        s.eta_u = [c](double u) { return sgn_star(u - c); };
        s.q = [f, x, side, c, alpha](double u) { return ((*f)(x, u, side) - alpha) * sgn_star(u - c); };
        return s;
    };
    return p;
}

EntropyFluxPair convex_entropy_pair(const ScalarFlux& flux, const SmoothFunction& eta) {
    if (eta.dim() != 1) throw PreconditionError("entropy must be a function of one variable");
    struct Data {
        ScalarFlux flux;
        SmoothFunction eta;
    };
    auto d = std::make_shared<const Data>(Data{flux, eta});
    EntropyFluxPair p;
    p.label = "convex(" + eta.text() + ")";
    p.section = [d](double x, Side side) {
        std::vector<double> K;
        for (const auto& t : d->flux.model().terms()) K.push_back(t.K.eval(x, side));
        EntropySection s;
        s.eta = [d](double u) { return d->eta(u); };
        s.eta_u = [d](double u) { return d->eta.derivative(u); };
        s.q = [d, K](double u) {
            // int_0^u eta'(s) sum_k K_k f_k'(s) ds, composite Gauss on 16 panels.
            constexpr int panels = 16;
            const double h = u / panels;
            double total = 0.0;
            for (int p = 0; p < panels; ++p) {
                const double c = (p + 0.5) * h;
                for (int j = 0; j < 5; ++j) {
                    const double sv = c + 0.5 * h * gl_x[j];
                    double bu = 0.0;
                    for (std::size_t k = 0; k < K.size(); ++k) bu += K[k] * d->flux.model().terms()[k].f.derivative(sv);
                    total += 0.5 * h * gl_w[j] * d->eta.derivative(sv) * bu;
                }
            }
            return total;
        };
        return s;
    };
    return p;
}

PairValidation validate_pair(const ScalarFlux& flux, const EntropyFluxPair& pair, double alpha, int samples) {
    PairValidation v;
    const Interval& dom = flux.domain();
    const Bounds& r = flux.range();
    const double width = r.hi - r.lo;
    const double h = 1e-5 * std::max(1.0, width);
    auto u_at = [&](int k) { return r.lo + width * (k + 0.5) / samples; };

    for (int i = 1; i < 20; ++i) {
        const double x = dom.a + dom.length() * i / 20.0;
        if (on_jump(flux.model(), x)) continue;
        const EntropySection s = pair.section(x, Side::stored);
        for (int k = 0; k < samples; ++k) {
            const double u = u_at(k);
            if (u - 2 * h < r.lo || u + 2 * h > r.hi) continue;
            const double target = s.eta_u(u) * flux.dw(x, u);
            // Second-order central and one-sided quotients; a kink of q can
            // sit on at most one side of u.
            const double qc = (s.q(u + h) - s.q(u - h)) / (2 * h);
            const double qf = (-3 * s.q(u) + 4 * s.q(u + h) - s.q(u + 2 * h)) / (2 * h);
            const double qb = (3 * s.q(u) - 4 * s.q(u - h) + s.q(u - 2 * h)) / (2 * h);
            const double err = std::min({std::abs(qc - target), std::abs(qf - target), std::abs(qb - target)});
            v.compatibility_error = std::max(v.compatibility_error, err / std::max(1.0, std::abs(target)));
            const double second = s.eta(u - h) + s.eta(u + h) - 2 * s.eta(u);
            v.convexity_defect = std::min(v.convexity_defect, second);
        }
    }

    for (double x : flux.model().jump_set()) {
        const EntropySection minus = pair.section(x, Side::left), plus = pair.section(x, Side::right);
        const Bounds right = flux.attained(x, Side::right);
        for (int k = 0; k < samples; ++k) {
            const double um = u_at(k);
            const double F = flux(x, um, Side::left);
            if (F < right.lo || F > right.hi) continue;
            const double up = c_alpha(flux, x, F, Side::right);
            ++v.rh_pairs;
            const double diff = plus.q(up) - minus.q(um);
            v.interface_max = std::max(v.interface_max, diff);
            if (std::isnan(alpha)) continue;
            // Signs of u -/+ c_alpha read through B, which is exact at the
            // level itself.
            const double o = flux.orientation();
            const double sm = sgn_star(o * (flux(x, um, Side::left) - alpha));
            const double sp = sgn_star(o * (flux(x, up, Side::right) - alpha));
            if (sm == sp) {
                v.interface_error = std::max(v.interface_error, std::abs(diff));
            } else {
                ++v.side_violations;
                char buf[160];
                std::snprintf(buf, sizeof buf, "x=%.6g u-=%.6g u+=%.6g alpha=%.6g: traces straddle c_alpha", x, um, up, alpha);
                v.log.emplace_back(buf);
            }
        }
    }
    return v;
}

double AffineEntropy::eta_N(double u) const {
    double s = a + b * u;
    for (std::size_t i = 0; i < b_i.size(); ++i) s += b_i[i] * std::abs(u - c[i + 1]);
    return s;
}

double AffineEntropy::q_N(const ScalarFlux& flux, double u, Side side) const {
    const double Bu = flux(x, u, side);
    double s = b * Bu;
    for (std::size_t i = 0; i < b_i.size(); ++i) s += b_i[i] * (Bu - alpha[i + 1]) * sgn_star(u - c[i + 1]);
    return s;
}

AffineEntropy affine_entropy_approx(const EntropyFluxPair& pair, const ScalarFlux& flux, int N, double x, Side side,
                                    double C) {
    if (N < 1) throw PreconditionError("N must be positive");
    AffineEntropy A;
    A.x = x;
    A.N = N;
    A.C = C > 0.0 ? C : flux.bound();
    const Bounds r = flux.attained(x, side);
    std::vector<int> idx;
    for (int i = -N; i <= N; ++i) {
        const double al = i * A.C / N;
        if (al >= r.lo && al <= r.hi) idx.push_back(i);
    }
    if (idx.empty()) throw RangeError("no level iC/N is attained at x = " + std::to_string(x));
    A.m = idx.front();
    A.n = idx.back();
    for (int i : idx) {
        A.alpha.push_back(i * A.C / N);
        A.c.push_back(c_alpha(flux, x, A.alpha.back(), side));
    }
    // Nodes in increasing order of u, so the slopes of the convex data increase.
    if (flux.orientation() < 0) {
        std::reverse(A.alpha.begin(), A.alpha.end());
        std::reverse(A.c.begin(), A.c.end());
    }
    const EntropySection s = pair.section(x, side);
    std::vector<double> e;
    for (double ci : A.c) e.push_back(s.eta(ci));
    const std::size_t k = A.c.size();
    for (std::size_t i = 0; i + 1 < k; ++i) A.delta.push_back((e[i + 1] - e[i]) / (A.c[i + 1] - A.c[i]));
    if (k == 1) {
        A.a = e[0];
        return A;
    }
    A.b = 0.5 * (A.delta.front() + A.delta.back());
    for (std::size_t i = 1; i + 1 < k; ++i) A.b_i.push_back(0.5 * (A.delta[i] - A.delta[i - 1]));
    A.a = e[0] - A.b * A.c[0];
    for (std::size_t i = 1; i + 1 < k; ++i) A.a -= A.b_i[i - 1] * (A.c[i] - A.c[0]);
    return A;
}

EntropyFluxPair affine_entropy_pair(const EntropyFluxPair& pair, const ScalarFlux& flux, int N, double C) {
    auto f = std::make_shared<const ScalarFlux>(flux);
    EntropyFluxPair p;
    p.label = pair.label + "^" + std::to_string(N);
    p.section = [f, pair, N, C](double x, Side side) {
        auto A = std::make_shared<const AffineEntropy>(affine_entropy_approx(pair, *f, N, x, side, C));
        EntropySection s;
        s.eta = [A](double u) { return A->eta_N(u); };
        s.eta_u = [A](double u) {
            double d = A->b;
            for (std::size_t i = 0; i < A->b_i.size(); ++i) d += A->b_i[i] * sgn_star(u - A->c[i + 1]);
            return d;
        };
        s.q = [A, f, side](double u) { return A->q_N(*f, u, side); };
        return s;
    };
    return p;
}

double ClawField::mass(std::size_t n) const {
    double m = 0.0;
    for (double u : states[n]) m += u * dx;
    return m;
}

BVFunction ClawField::slice(std::size_t n) const {
    std::vector<double> nodes;
    for (int j = 1; j < cells; ++j) nodes.push_back(interface(j));
    return BVFunction::piecewise_constant({x_lo, x_hi}, nodes, states[n]);
}

ClawField solve_claw(const ScalarFlux& flux, const BVFunction& u0, double T, int cells, double cfl) {
    if (!(cfl > 0.0 && cfl <= 0.5)) throw PreconditionError("CFL number must lie in ]0, 1/2]");
    if (cells < 4) throw PreconditionError("at least 4 cells are needed");
    if (!(T > 0.0)) throw PreconditionError("final time must be positive");
    const Interval& dom = flux.domain();
    if (!(u0.domain() == dom)) throw PreconditionError("initial datum and flux live on different domains");

    ClawField F;
    F.x_lo = dom.a;
    F.x_hi = dom.b;
    F.cells = cells;
    F.dx = dom.length() / cells;
    F.cfl = cfl;
    std::vector<char> coupled(static_cast<std::size_t>(cells) + 1, 0);
    for (double xj : flux.model().jump_set()) {
        const double j = std::round((xj - dom.a) / F.dx);
        if (std::abs(dom.a + j * F.dx - xj) > 1e-9 * F.dx)
            throw PreconditionError("jump of K at x = " + std::to_string(xj) + " is not on a cell interface");
        coupled[static_cast<std::size_t>(j)] = 1;
    }

    const Bounds& range = flux.range();
    const double slack = 1e-12 * std::max(1.0, range.hi - range.lo);
    auto check_range = [&](const std::vector<double>& u) {
        for (double v : u)
            if (v < range.lo - slack || v > range.hi + slack)
                throw RangeError("state " + std::to_string(v) + " left the working range of the flux");
    };

    std::vector<double> u(static_cast<std::size_t>(cells));
    QuadratureOptions opt;
    opt.tol = 1e-13;
    const auto& pieces = u0.smooth();
    for (int i = 0; i < cells; ++i) {
        const double lo = F.interface(i), hi = F.interface(i + 1);
        // Cells inside a constant piece take the value itself, so constant
        // states are reproduced bit for bit.
        const auto& br = pieces.breaks();
        const auto p = static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), lo) - br.begin()) - 1;
        const bool flat = !u0.has_cantor() && p + 1 < br.size() && br[p + 1] >= hi && pieces.pieces()[p].degree() == 0;
        u[static_cast<std::size_t>(i)] =
            flat ? pieces.pieces()[p](lo) : integrate_lebesgue(u0.integrand(), lo, hi, opt) / F.dx;
    }
    check_range(u);

    const double dt_max = cfl * F.dx / flux.max_speed();
    const int o = flux.orientation();
    double t = 0.0;
    F.times.push_back(t);
    F.states.push_back(u);
    std::vector<double> Fi(static_cast<std::size_t>(cells) + 1);
    while (t < T) {
        const double dt = std::min(dt_max, T - t);
        for (int j = 0; j <= cells; ++j) {
            const double x = F.interface(j);
            const double uL = u[static_cast<std::size_t>(std::max(j - 1, 0))];
            const double uR = u[static_cast<std::size_t>(std::min(j, cells - 1))];
            double value;
            if (coupled[static_cast<std::size_t>(j)]) {
                // Upwind trace, matched on the downwind side.
                const Side up = o > 0 ? Side::left : Side::right, down = o > 0 ? Side::right : Side::left;
                value = flux(x, o > 0 ? uL : uR, up);
                const Bounds reach = flux.attained(x, down);
                if (value < reach.lo || value > reach.hi)
                    throw RangeError("interface flux at x = " + std::to_string(x) + " has no trace on the other side");
            } else {
                const Side side = j == 0 ? Side::right : (j == cells ? Side::left : Side::precise);
                value = flux(x, o > 0 ? uL : uR, side);
            }
            Fi[static_cast<std::size_t>(j)] = value;
        }
        const double m0 = F.mass(F.states.size() - 1);
        for (int i = 0; i < cells; ++i) {
            const auto k = static_cast<std::size_t>(i);
            u[k] -= dt / F.dx * (Fi[k + 1] - Fi[k]);
        }
        check_range(u);
        t = (T - t <= dt_max) ? T : t + dt;
        F.times.push_back(t);
        F.states.push_back(u);
        F.fluxes.push_back(Fi);
        const double m1 = F.mass(F.states.size() - 1);
        F.mass_drift.push_back(std::abs(m1 - m0 + dt * (Fi.back() - Fi.front())));
    }
    return F;
}

ClawField sample_field(double x_lo, double x_hi, int cells, std::vector<double> times,
                       const std::function<double(double, double)>& u,
                       const std::function<std::vector<double>(double)>& jumps) {
    if (cells < 4) throw PreconditionError("at least 4 cells are needed");
    if (!std::is_sorted(times.begin(), times.end())) throw PreconditionError("times must increase");
    ClawField F;
    F.x_lo = x_lo;
    F.x_hi = x_hi;
    F.cells = cells;
    F.dx = (x_hi - x_lo) / cells;
    F.times = std::move(times);
    QuadratureOptions opt;
    opt.tol = 1e-12;
    for (double t : F.times) {
        Integrand g;
        g.fn = [&u, t](double x) { return u(x, t); };
        g.breaks = jumps(t);
        sort_unique(g.breaks);
        std::vector<double> row(static_cast<std::size_t>(cells));
        for (int i = 0; i < cells; ++i)
            row[static_cast<std::size_t>(i)] = integrate_lebesgue(g, F.interface(i), F.interface(i + 1), opt) / F.dx;
        F.states.push_back(std::move(row));
    }
    return F;
}

double entropy_residual(const ClawField& field, const ScalarFlux& flux, const EntropyFluxPair& pair,
                        const SpaceTimeTest& phi) {
    for (const TestFunction* f : {&phi.space, &phi.time}) {
        const Interval s = f->support();
        for (int k = 0; k <= 400; ++k)
            if ((*f)(s.a + s.length() * k / 400.0) < -1e-14)
                throw PreconditionError("space-time test function must be nonnegative");
    }
    const Interval sx = phi.space.support();
    const auto& kinks = flux.model().breakpoints();

    // Quadrature nodes per cell, split at breakpoints of K inside the cell.
    struct Node {
        std::size_t cell;
        double w_phi, w_dphi;
        EntropySection section;
    };
    std::vector<Node> nodes;
    for (int i = 0; i < field.cells; ++i) {
        const double lo = std::max(field.interface(i), sx.a), hi = std::min(field.interface(i + 1), sx.b);
        if (!(lo < hi)) continue;
        std::vector<double> cuts{lo, hi};
        for (double x : kinks)
            if (x > lo && x < hi) cuts.push_back(x);
        sort_unique(cuts);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double a = cuts[p], h = cuts[p + 1] - cuts[p];
            for (int j = 0; j < 5; ++j) {
                const double x = a + 0.5 * h * (1.0 + gl_x[j]);
                const double w = 0.5 * h * gl_w[j];
                nodes.push_back({static_cast<std::size_t>(i), w * phi.space(x), w * phi.space.derivative(x),
                                 pair.section(x, Side::stored)});
            }
        }
    }

    double residual = 0.0;
    for (std::size_t n = 0; n + 1 < field.states.size(); ++n) {
        const double pt = phi.time(field.times[n]);
        if (pt == 0.0) continue;
        const double dt = field.times[n + 1] - field.times[n];
        const auto& now = field.states[n];
        const auto& next = field.states[n + 1];
        double change = 0.0, transport = 0.0;
        for (const auto& nd : nodes) {
            change += nd.w_phi * (nd.section.eta(next[nd.cell]) - nd.section.eta(now[nd.cell]));
            transport += nd.w_dphi * nd.section.q(now[nd.cell]);
        }
        residual += pt * (change - dt * transport);
    }
    return residual;
}

void write_field_csv(std::ostream& out, const ClawField& field, bool mass_drift) {
    out << (mass_drift ? "x,t,u,mass_drift\n" : "x,t,u\n");
    char buf[128];
    for (std::size_t n = 0; n < field.states.size(); ++n) {
        const double drift = n == 0 || n > field.mass_drift.size() ? 0.0 : field.mass_drift[n - 1];
        for (int i = 0; i < field.cells; ++i) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", field.center(i), field.times[n],
                                          field.states[n][static_cast<std::size_t>(i)]);
            out.write(buf, len);
            if (mass_drift) {
                std::snprintf(buf, sizeof buf, ",%.17g", drift);
                out << buf;
            }
            out << '\n';
        }
    }
}

}  // namespace bvcalc
