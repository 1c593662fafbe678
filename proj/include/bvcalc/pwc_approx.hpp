#pragma once

#include <cstddef>
#include <vector>

#include "bvcalc/bv_function.hpp"

namespace bvcalc {

/// Step function on a partition a = y0 < ... < ym = b with its own values at
/// the interior nodes.
class PiecewiseConstant {
public:
    PiecewiseConstant() = default;
    /// values has one entry per cell, node_values one per interior node.
    PiecewiseConstant(std::vector<double> partition, std::vector<double> values, std::vector<double> node_values);

    const std::vector<double>& partition() const { return partition_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& node_values() const { return node_values_; }
    Interval domain() const { return {partition_.front(), partition_.back()}; }
    std::size_t cells() const { return values_.size(); }

    /// Node value at an interior node, cell value elsewhere.
    double eval(double x) const;
    double left(double x) const;
    double right(double x) const;

    /// Interior nodes where the one-sided limits differ.
    std::vector<double> jump_set() const;
    /// Pointwise variation, node values included.
    double total_variation() const;

    /// Same cells as a BVFunction; node values become the policy's choice.
    BVFunction to_bv(RepresentativePolicy policy = {}) const;

private:
    std::size_t cell_of(double x) const;

    std::vector<double> partition_;
    std::vector<double> values_;
    std::vector<double> node_values_;
};

/// Finite stand-in for the countable set P together with the prefix P_eps
/// whose point values must be reproduced.
struct ExceptionalSet {
    std::vector<double> P;
    std::vector<double> P_eps;

    /// P with its first k points as P_eps.
    static ExceptionalSet prefix(std::vector<double> P, std::size_t k);
};

/// Quantities picked by the construction, for reports and tests.
struct ApproxInfo {
    std::size_t big_jumps = 0;
    double tail = 0.0;
    double delta = 0.0;
    /// Extra nodes inserted to separate crowded P_eps points or to keep them
    /// off cells bounded by a big jump.
    std::size_t local_refinements = 0;
};

/// Step approximation with |v_eps - v| < eps that keeps every jump larger
/// than eps/3 with its one-sided limits, has no node in P, matches v on
/// P_eps and does not increase the total variation.
///
/// Throws PreconditionError when P meets the jump set of v or leaves the
/// domain, or when P_eps is not contained in P.
PiecewiseConstant approximate_scalar(const BVFunction& v, double eps, const ExceptionalSet& exc,
                                     ApproxInfo* info = nullptr);

/// Componentwise approximation with eps = 3/n and P_eps the first n points
/// of P; the sup-norm error is below 3 sqrt(d) / n.
std::vector<PiecewiseConstant> approximate_vector(const BVVector& u, int n, const ExceptionalSet& exc);

}  // namespace bvcalc
