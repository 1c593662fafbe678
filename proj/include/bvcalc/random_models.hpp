#pragma once

#include <random>
#include <vector>

#include "bvcalc/bv_function.hpp"
#include "bvcalc/flux_model.hpp"

namespace bvcalc {

/// Knobs for random closed-form BV functions.
struct RandomBVOptions {
    Interval domain{0.0, 1.0};
    int max_pieces = 4;
    int max_degree = 2;
    double jump_probability = 0.7;
    /// Cantor bases a summand may be drawn from; empty means none.
    std::vector<CantorBase> dictionary;
    double cantor_probability = 0.5;
    /// Points preferred as breakpoints (for instance a flux jump set).
    std::vector<double> preferred_nodes;
    double preferred_probability = 0.5;
    /// Keep pieces affine and co-monotone with Cantor summands, so level
    /// sets stay finite.
    bool coarea_safe = false;
};

BVFunction random_bv(std::mt19937_64& rng, const RandomBVOptions& opt);

/// A bump or a bump times an affine factor with support inside `domain`.
TestFunction random_test_function(std::mt19937_64& rng, const Interval& domain);

/// The Cantor dictionaries used by the randomized suites on ]0,1[.
std::vector<CantorBase> random_dictionary(std::mt19937_64& rng);

/// B = sum of 1 to 3 terms K_k f_k(w). Each K_k is drawn from polynomial
/// pieces with jumps, a combination of Heaviside steps, or a Cantor summand
/// plus a polynomial; each f_k from a fixed family of smooth expressions in
/// randomly chosen variables.
FluxModel random_flux_model(std::mt19937_64& rng, std::size_t dim, const Interval& domain,
                            const std::vector<CantorBase>& dictionary);

/// One randomized chain-rule input: u prefers the jump set of B as nodes.
struct ChainRuleCase {
    FluxModel B;
    BVVector u;
    std::vector<TestFunction> phis;
};

ChainRuleCase random_chain_case(std::mt19937_64& rng, std::size_t test_functions = 5);

}  // namespace bvcalc
