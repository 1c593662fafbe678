#include "bvcalc/pwc_approx.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace bvcalc {

PiecewiseConstant::PiecewiseConstant(std::vector<double> partition, std::vector<double> values,
                                     std::vector<double> node_values)
    : partition_(std::move(partition)), values_(std::move(values)), node_values_(std::move(node_values)) {
    if (partition_.size() < 2) throw PreconditionError("partition needs at least two points");
    if (!std::is_sorted(partition_.begin(), partition_.end()) ||
        std::adjacent_find(partition_.begin(), partition_.end()) != partition_.end())
        throw PreconditionError("partition must be strictly increasing");
    if (values_.size() + 1 != partition_.size()) throw PreconditionError("one value per cell");
    if (node_values_.size() + 2 != partition_.size()) throw PreconditionError("one node value per interior node");
}

std::size_t PiecewiseConstant::cell_of(double x) const {
    const auto it = std::upper_bound(partition_.begin(), partition_.end(), x);
    return static_cast<std::size_t>(it - partition_.begin()) - 1;
}

double PiecewiseConstant::eval(double x) const {
    if (!domain().contains_open(x)) throw DomainError("step function evaluated outside its domain");
    const std::size_t i = cell_of(x);
    if (partition_[i] == x) return node_values_[i - 1];
    return values_[i];
}

double PiecewiseConstant::left(double x) const {
    if (!(x > partition_.front() && x <= partition_.back())) throw DomainError("left limit outside the domain");
    const auto it = std::lower_bound(partition_.begin(), partition_.end(), x);
    return values_[static_cast<std::size_t>(it - partition_.begin()) - 1];
}

double PiecewiseConstant::right(double x) const {
    if (!(x >= partition_.front() && x < partition_.back())) throw DomainError("right limit outside the domain");
    return values_[cell_of(x)];
}

std::vector<double> PiecewiseConstant::jump_set() const {
    std::vector<double> j;
    for (std::size_t i = 1; i + 1 < partition_.size(); ++i)
        if (values_[i - 1] != values_[i]) j.push_back(partition_[i]);
    return j;
}

double PiecewiseConstant::total_variation() const {
    double tv = 0.0;
    for (std::size_t i = 0; i < node_values_.size(); ++i)
        tv += std::abs(node_values_[i] - values_[i]) + std::abs(values_[i + 1] - node_values_[i]);
    return tv;
}

BVFunction PiecewiseConstant::to_bv(RepresentativePolicy policy) const {
    std::vector<double> nodes(partition_.begin() + 1, partition_.end() - 1);
    return BVFunction::piecewise_constant(domain(), std::move(nodes), values_).with_policy(policy);
}

ExceptionalSet ExceptionalSet::prefix(std::vector<double> P, std::size_t k) {
    ExceptionalSet e;
    e.P_eps.assign(P.begin(), P.begin() + static_cast<std::ptrdiff_t>(std::min(k, P.size())));
    e.P = std::move(P);
    return e;
}

namespace {

struct Jump {
    double x;
    double size;
};

/// Largest window (in grid steps) on which the sampled continuous part
/// oscillates by less than `bound`.
std::size_t max_window(const std::vector<double>& f, double bound) {
    auto osc = [&](std::size_t k) {
        std::deque<std::size_t> hi, lo;
        double worst = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            while (!hi.empty() && f[hi.back()] <= f[i]) hi.pop_back();
            while (!lo.empty() && f[lo.back()] >= f[i]) lo.pop_back();
            hi.push_back(i);
            lo.push_back(i);
            if (hi.front() + k <= i) hi.pop_front();
            if (lo.front() + k <= i) lo.pop_front();
            worst = std::max(worst, f[hi.front()] - f[lo.front()]);
        }
        return worst;
    };
    if (osc(2) >= bound) return 0;
    std::size_t good = 2, bad = f.size() + 1;
    if (osc(f.size()) < bound) return f.size();
    while (bad - good > 1) {
        const std::size_t mid = good + (bad - good) / 2;
        (osc(mid) < bound ? good : bad) = mid;
    }
    return good;
}

/// delta with |v_C(x) - v_C(y)| < eps/3 whenever |x - y| < delta, from a
/// bisection on a dense grid, halved once.
double continuity_delta(const BVFunction& v, const std::vector<Jump>& jumps, double bound) {
    const Interval& dom = v.domain();
    for (std::size_t grid = std::size_t{1} << 14; grid <= (std::size_t{1} << 22); grid <<= 2) {
        const double h = dom.length() / static_cast<double>(grid + 1);
        std::vector<double> f(grid);
        std::size_t next = 0;
        double passed = 0.0;
        for (std::size_t i = 0; i < grid; ++i) {
            const double x = dom.a + h * static_cast<double>(i + 1);
            while (next < jumps.size() && jumps[next].x < x) passed += jumps[next++].size;
            f[i] = v.eval(x, next < jumps.size() && jumps[next].x == x ? Side::left : Side::right) - passed;
        }
        const std::size_t k = max_window(f, bound);
        if (k == 0) continue;
        if (k == grid) return dom.length();
        return 0.5 * h * static_cast<double>(k - 1);
    }
    throw RepresentationError("continuous part too steep for the sampling grid");
}

class PartitionBuilder {
public:
    PartitionBuilder(Interval dom, std::vector<double> forbidden, std::vector<double> big)
        : dom_(dom), forbidden_(std::move(forbidden)), big_(std::move(big)) {
        forbidden_.insert(forbidden_.end(), big_.begin(), big_.end());
        sort_unique(forbidden_);
        nodes_.push_back(dom.a);
        nodes_.insert(nodes_.end(), big_.begin(), big_.end());
        nodes_.push_back(dom.b);
    }

    bool is_big(double y) const { return std::binary_search(big_.begin(), big_.end(), y); }
    std::vector<double>& nodes() { return nodes_; }

    /// Nearest admissible point to y inside ]lo, hi[, trying the left side
    /// first at each distance.
    double admissible(double y, double lo, double hi) const {
        const double eta = 1e-9 * dom_.length();
        for (int k = 0; k < 4096; ++k) {
            for (double s : {-1.0, 1.0}) {
                const double c = y + s * eta * k;
                if (c > lo && c < hi && !clashes(c)) return c;
                if (k == 0) break;
            }
        }
        throw RepresentationError("no admissible partition node in a cell");
    }

    /// Fills gaps so that consecutive nodes are closer than `spacing`, with
    /// at least one node between two big jumps.
    void fill(double spacing) {
        std::vector<double> out{nodes_.front()};
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            const double lo = nodes_[i], hi = nodes_[i + 1];
            std::size_t parts = static_cast<std::size_t>(std::ceil((hi - lo) / spacing));
            if (is_big(lo) && is_big(hi)) parts = std::max<std::size_t>(parts, 2);
            parts = std::max<std::size_t>(parts, 1);
            double prev = lo;
            for (std::size_t j = 1; j < parts; ++j) {
                const double target = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(parts);
                const double y = admissible(target, prev, hi);
                out.push_back(y);
                prev = y;
            }
            out.push_back(hi);
        }
        nodes_ = std::move(out);
    }

    void insert(double y) { nodes_.insert(std::upper_bound(nodes_.begin(), nodes_.end(), y), y); }

private:
    bool clashes(double c) const {
        const double tiny = 1e-12 * dom_.length();
        const auto it = std::lower_bound(forbidden_.begin(), forbidden_.end(), c - tiny);
        return it != forbidden_.end() && *it <= c + tiny;
    }

    Interval dom_;
    std::vector<double> forbidden_;
    std::vector<double> big_;
    std::vector<double> nodes_;
};

}  // namespace

PiecewiseConstant approximate_scalar(const BVFunction& v, double eps, const ExceptionalSet& exc, ApproxInfo* info) {
    if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
    const Interval& dom = v.domain();
    const auto jump_points = v.jump_set();
    std::vector<double> P = exc.P;
    sort_unique(P);
    for (double p : P) {
        if (!dom.contains_open(p)) throw PreconditionError("exceptional point outside the domain");
        if (std::binary_search(jump_points.begin(), jump_points.end(), p))
            throw PreconditionError("exceptional set meets the jump set");
    }
    std::vector<double> P_eps = exc.P_eps;
    sort_unique(P_eps);
    for (double p : P_eps)
        if (!std::binary_search(P.begin(), P.end(), p)) throw PreconditionError("P_eps must be a subset of P");

    std::vector<Jump> jumps;
    for (double x : jump_points) jumps.push_back({x, v.right(x) - v.left(x)});

    // Big jumps: the fewest largest ones whose complement sums to at most eps/3.
    std::vector<std::size_t> order(jumps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(jumps[i].size) > std::abs(jumps[j].size); });
    double tail = 0.0;
    for (const auto& j : jumps) tail += std::abs(j.size);
    std::size_t n_big = 0;
    while (tail > eps / 3.0 && n_big < order.size()) tail -= std::abs(jumps[order[n_big++]].size);
    tail = 0.0;
    std::vector<double> big, small;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (r < n_big) {
            big.push_back(jumps[order[r]].x);
        } else {
            small.push_back(jumps[order[r]].x);
            tail += std::abs(jumps[order[r]].size);
        }
    }
    std::sort(big.begin(), big.end());

    const double delta = continuity_delta(v, jumps, eps / 3.0);

    std::vector<double> forbidden = P;
    forbidden.insert(forbidden.end(), small.begin(), small.end());
    PartitionBuilder pb(dom, std::move(forbidden), big);
    pb.fill(0.5 * delta);

    // Each cell holds at most one point of P_eps and such a cell is not
    // bounded by a big jump.
    std::size_t refinements = 0;
    for (bool changed = true; changed;) {
        changed = false;
        auto& y = pb.nodes();
        for (std::size_t i = 0; i + 1 < y.size() && !changed; ++i) {
            const auto first = std::upper_bound(P_eps.begin(), P_eps.end(), y[i]);
            const auto last = std::lower_bound(P_eps.begin(), P_eps.end(), y[i + 1]);
            const auto count = last - first;
            if (count >= 2) {
                pb.insert(pb.admissible(0.5 * (first[0] + first[1]), first[0], first[1]));
                changed = true;
            } else if (count == 1 && pb.is_big(y[i])) {
                const double d = std::min(0.25 * delta, (*first - y[i]) / 3.0);
                pb.insert(pb.admissible(y[i] + d, y[i], *first));
                changed = true;
            } else if (count == 1 && pb.is_big(y[i + 1])) {
                const double d = std::min(0.25 * delta, (y[i + 1] - *first) / 3.0);
                pb.insert(pb.admissible(y[i + 1] - d, *first, y[i + 1]));
                changed = true;
            }
            if (changed) ++refinements;
        }
    }

    const auto& y = pb.nodes();
    std::vector<double> values(y.size() - 1), node_values(y.size() - 2);
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        const auto inside = std::upper_bound(P_eps.begin(), P_eps.end(), y[i]);
        if (inside != P_eps.end() && *inside < y[i + 1])
            values[i] = v.eval(*inside);
        else if (i + 2 < y.size() && pb.is_big(y[i + 1]))
            values[i] = v.left(y[i + 1]);
        else
            values[i] = v.right(y[i]);
    }
    for (std::size_t i = 1; i + 1 < y.size(); ++i) node_values[i - 1] = v.eval(y[i]);

    if (info) *info = {big.size(), tail, delta, refinements};
    return PiecewiseConstant(y, std::move(values), std::move(node_values));
}

std::vector<PiecewiseConstant> approximate_vector(const BVVector& u, int n, const ExceptionalSet& exc) {
    if (n < 1) throw PreconditionError("n must be positive");
    const auto e = ExceptionalSet::prefix(exc.P, static_cast<std::size_t>(n));
    std::vector<PiecewiseConstant> out;
    out.reserve(u.dim());
    for (const auto& c : u.components()) out.push_back(approximate_scalar(c, 3.0 / n, e));
    return out;
}

}  // namespace bvcalc
