#include "bvcalc/flux_model.hpp"

#include <algorithm>
#include <cmath>

#include "bvcalc/bv_ops.hpp"
#include "bvcalc/errors.hpp"

namespace bvcalc {

FluxModel::FluxModel(std::vector<FluxTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw PreconditionError("flux model needs at least one term");
    for (const auto& t : terms_) {
        if (!(t.K.domain() == domain())) throw PreconditionError("flux terms live on different domains");
        if (t.f.empty()) throw PreconditionError("flux term without a smooth factor");
        if (t.f.dim() != dim()) throw PreconditionError("flux terms disagree on the dimension of w");
        for (double x : t.K.jump_set()) jumps_.push_back(x);
        for (double x : t.K.breakpoints()) breaks_.push_back(x);
        for (const auto& b : t.K.cantor_bases())
            if (std::find(bases_.begin(), bases_.end(), b) == bases_.end()) bases_.push_back(b);
        dK_.push_back(t.K.smooth().derivative());
    }
    sort_unique(jumps_);
    sort_unique(breaks_);
    check_cantor_dictionary(bases_);
}

double FluxModel::cantor_coefficient(std::size_t k, const CantorBase& base) const {
    double c = 0.0;
    for (const auto& comp : terms_[k].K.cantor())
        if (comp.base == base) c += comp.coefficient;
    return c;
}

double FluxModel::lambda_weight(const CantorBase& base) const {
    double s = 0.0;
    for (std::size_t k = 0; k < terms_.size(); ++k) s += std::abs(cantor_coefficient(k, base));
    return s;
}

RadonMeasure FluxModel::lambda() const {
    RadonMeasure m(domain());
    for (const auto& b : bases_) m.add_cantor(b, lambda_weight(b));
    return m;
}

double FluxModel::eval(double x, std::span<const double> w, Side side) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.K.eval(x, side) * t.f(w);
    return s;
}

RadonMeasure FluxModel::x_derivative(std::span<const double> w) const {
    RadonMeasure m(domain());
    for (const auto& t : terms_) m += derivative(t.K) * t.f(w);
    return m;
}

double flux_eval(const FluxModel& B, double x, std::span<const double> w, Side side) { return B.eval(x, w, side); }

FluxDerivatives flux_derivatives(const FluxModel& B, double x, std::span<const double> w) {
    if (!B.domain().contains_open(x)) throw DomainError("flux derivative outside the domain");
    if (std::binary_search(B.jump_set().begin(), B.jump_set().end(), x))
        throw DomainError("pointwise flux derivatives are undefined on the jump set of K");
    FluxDerivatives d;
    d.grad_w.assign(B.dim(), 0.0);
    std::vector<double> g(B.dim());
    for (std::size_t k = 0; k < B.terms().size(); ++k) {
        const auto& t = B.terms()[k];
        d.grad_x += B.K_derivative(k)(x) * t.f(w);
        t.f.gradient_into(w, g);
        const double Kx = t.K.eval(x);
        for (std::size_t i = 0; i < g.size(); ++i) d.grad_w[i] += Kx * g[i];
    }
    for (const auto& base : B.cantor_bases()) {
        double num = 0.0;
        for (std::size_t k = 0; k < B.terms().size(); ++k) num += B.terms()[k].f(w) * B.cantor_coefficient(k, base);
        d.psi.bases.push_back(base);
        d.psi.values.push_back(num / B.lambda_weight(base));
    }
    return d;
}

FluxBounds flux_bounds(const FluxModel& B, std::span<const Bounds> box) {
    if (box.size() != B.dim()) throw PreconditionError("box dimension mismatch");
    FluxBounds fb;
    fb.box.assign(box.begin(), box.end());
    fb.mu = RadonMeasure(B.domain());
    double mass_bound = 0.0, grad_bound = 0.0, psi_bound = 0.0;
    for (std::size_t k = 0; k < B.terms().size(); ++k) {
        const auto& t = B.terms()[k];
        const double lip = t.f.lipschitz(box);
        const double fmax = t.f.range(box).mag();
        fb.lipschitz.push_back(lip);
        const RadonMeasure dK = derivative(t.K);
        const double tv = measure_total_variation(dK);
        fb.mu += variation_measure(dK) * lip;
        fb.mu_mass += lip * tv;
        mass_bound += fmax * tv;
        const auto& dk = B.K_derivative(k);
        double kprime = 0.0, kmax = 0.0;
        for (std::size_t p = 0; p < dk.piece_count(); ++p)
            kprime = std::max(kprime, dk.pieces()[p].max_abs(dk.breaks()[p], dk.breaks()[p + 1]));
        const auto& sm = t.K.smooth();
        for (std::size_t p = 0; p < sm.piece_count(); ++p)
            kmax = std::max(kmax, sm.pieces()[p].max_abs(sm.breaks()[p], sm.breaks()[p + 1]));
        for (const auto& c : t.K.cantor()) kmax += std::abs(c.coefficient);
        grad_bound += fmax * kprime;
        fb.D += kmax * lip;
    }
    for (const auto& base : B.cantor_bases()) {
        double s = 0.0;
        for (std::size_t k = 0; k < B.terms().size(); ++k)
            s += B.terms()[k].f.range(box).mag() * std::abs(B.cantor_coefficient(k, base));
        psi_bound = std::max(psi_bound, s / B.lambda_weight(base));
    }
    fb.C = std::max({mass_bound, grad_bound, psi_bound});
    return fb;
}

double lipschitz_slack(const FluxModel& B, const FluxBounds& bounds, std::span<const double> w,
                       std::span<const double> w2) {
    double dist = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!bounds.box[i].contains(w[i]) || !bounds.box[i].contains(w2[i]))
            throw PreconditionError("Lipschitz check outside the bounding box");
        dist += (w[i] - w2[i]) * (w[i] - w2[i]);
    }
    const double tv = measure_total_variation(B.x_derivative(w) - B.x_derivative(w2));
    return std::sqrt(dist) * bounds.mu_mass - tv;
}

}  // namespace bvcalc
