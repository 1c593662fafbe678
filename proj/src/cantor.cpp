#include "bvcalc/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bvcalc/errors.hpp"

namespace bvcalc {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

double cantor_function_eval(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cantor_function_eval: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // x = m / 2^e exactly; scan ternary digits of the dyadic rational.
    int exp2 = 0;
    const double frac = std::frexp(x, &exp2);
    auto m = static_cast<u128>(std::ldexp(frac, 53));
    int e = 53 - exp2;
    constexpr int max_shift = 120;
    if (e > max_shift) {
        m >>= (e - max_shift);
        e = max_shift;
    }
    const u128 mask = (static_cast<u128>(1) << e) - 1;

    double result = 0.0;
    double scale = 0.5;
    for (int k = 0; k < 64 && m != 0; ++k) {
        m *= 3;
        const auto digit = static_cast<unsigned>(m >> e);
        m &= mask;
        if (digit == 1) return result + scale;
        if (digit == 2) result += scale;
        scale *= 0.5;
    }
    return result;
}

double CantorBase::cantor_function(double x) const {
    if (x <= support.a) return 0.0;
    if (x >= support.b) return 1.0;
    return cantor_function_eval(std::clamp((x - support.a) / support.length(), 0.0, 1.0));
}

std::string CantorBase::id() const {
    std::ostringstream os;
    os.precision(17);
    os << "cantor[" << support.a << "," << support.b << "]";
    return os.str();
}

void check_cantor_dictionary(std::span<const CantorBase> bases) {
    for (std::size_t i = 0; i < bases.size(); ++i)
        for (std::size_t j = i + 1; j < bases.size(); ++j) {
            if (bases[i] == bases[j]) continue;
            if (!bases[i].support.disjoint_closed(bases[j].support))
                throw RepresentationError("Cantor bases " + bases[i].id() + " and " + bases[j].id() +
                                          " overlap without being identical");
        }
}

int cantor_depth_for(double tol, double lip, double length) {
    const double ratio = std::max(lip, 1e-300) * length / std::max(tol, 1e-300);
    if (ratio <= 1.0) return 1;
    const int d = static_cast<int>(std::ceil(std::log(ratio) / std::log(3.0)));
    return std::clamp(d, 1, 24);
}

namespace {

struct CantorCells {
    const Integrand& f;
    int depth;
    int cap;

    bool has_break_inside(double lo, double hi) const {
        const auto it = std::upper_bound(f.breaks.begin(), f.breaks.end(), lo);
        return it != f.breaks.end() && *it < hi;
    }

    double rec(double lo, double len, double mass, int level) const {
        if (lo + len < f.support_lo || lo > f.support_hi) return 0.0;
        if (level >= depth && (level >= cap || !has_break_inside(lo, lo + len))) {
            const double v = f.fn(lo + 0.5 * len);
            if (!std::isfinite(v)) throw QuadratureError("integrand is not finite on a Cantor support");
            return mass * v;
        }
        const double third = len / 3.0;
        return rec(lo, third, 0.5 * mass, level + 1) + rec(lo + 2.0 * third, third, 0.5 * mass, level + 1);
    }
};

}  // namespace

double integrate_cantor(const Integrand& f, const CantorBase& base, int depth) {
    if (depth < 1) throw PreconditionError("integrate_cantor: depth must be >= 1");
    if (!std::is_sorted(f.breaks.begin(), f.breaks.end())) {
        Integrand sorted = f;
        sort_unique(sorted.breaks);
        return integrate_cantor(sorted, base, depth);
    }
    CantorCells cells{f, depth, std::min(depth + 24, 52)};
    return cells.rec(base.support.a, base.support.length(), 1.0, 0);
}

}  // namespace bvcalc
