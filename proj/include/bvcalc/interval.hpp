#pragma once

#include <algorithm>
#include <vector>

#include "bvcalc/errors.hpp"

namespace bvcalc {

/// Open interval ]a,b[ with a < b. Closed supports use the same type.
struct Interval {
    double a = 0.0;
    double b = 1.0;

    Interval() = default;
    Interval(double lo, double hi) : a(lo), b(hi) {
        if (!(lo < hi)) throw PreconditionError("interval needs a < b");
    }

    double length() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }
    bool contains_open(double x) const { return x > a && x < b; }
    bool contains_closed(double x) const { return x >= a && x <= b; }
    bool contains(const Interval& other) const { return other.a >= a && other.b <= b; }
    bool disjoint_closed(const Interval& other) const { return other.a > b || other.b < a; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Which value of a BV function to read at a point.
enum class Side {
    left,     ///< u(x-)
    right,    ///< u(x+)
    precise,  ///< (u(x+) + u(x-)) / 2
    stored,   ///< the representative selected by the function's policy
};

/// Sorts and removes exact duplicates.
inline void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace bvcalc
