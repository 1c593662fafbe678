#include "bvcalc/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bvcalc {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

BVFunction random_bv(std::mt19937_64& rng, const RandomBVOptions& opt) {
    const Interval& dom = opt.domain;
    const double len = dom.length();

    std::vector<double> nodes;
    const int n_nodes = uniform_int(rng, 0, std::max(0, opt.max_pieces - 1));
    for (int i = 0; i < n_nodes; ++i) {
        double x;
        if (!opt.preferred_nodes.empty() && coin(rng, opt.preferred_probability))
            x = opt.preferred_nodes[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(opt.preferred_nodes.size()) - 1))];
        else
            x = dom.a + len * uniform(rng, 0.05, 0.95);
        const bool crowded = std::any_of(nodes.begin(), nodes.end(), [&](double y) { return std::abs(x - y) < 1e-3 * len; });
        if (!crowded && dom.contains_open(x)) nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());

    std::vector<CantorComponent> cantor;
    if (!opt.dictionary.empty() && coin(rng, opt.cantor_probability)) {
        const auto& base = opt.dictionary[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(opt.dictionary.size()) - 1))];
        const double c = uniform(rng, 0.3, 1.5) * (coin(rng, 0.5) ? 1.0 : -1.0);
        cantor.push_back({base, c});
    }

    std::vector<double> breaks{dom.a};
    breaks.insert(breaks.end(), nodes.begin(), nodes.end());
    breaks.push_back(dom.b);
    std::vector<Polynomial> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const int deg = opt.coarea_safe ? uniform_int(rng, 0, 1) : uniform_int(rng, 0, opt.max_degree);
        std::vector<double> c(static_cast<std::size_t>(deg) + 1);
        for (double& v : c) v = uniform(rng, -1.0, 1.0);
        if (opt.coarea_safe && deg == 1) {
            for (const auto& comp : cantor) {
                const bool overlaps = breaks[i] < comp.base.support.b && breaks[i + 1] > comp.base.support.a;
                if (overlaps && (c[1] > 0.0) != (comp.coefficient > 0.0)) c[1] = -c[1];
            }
        }
        Polynomial p(c);
        if (i > 0 && !coin(rng, opt.jump_probability)) p += Polynomial::constant(pieces.back()(breaks[i]) - p(breaks[i]));
        pieces.push_back(std::move(p));
    }
    return BVFunction(dom, PiecewisePolynomial(std::move(breaks), std::move(pieces)), std::move(cantor));
}

TestFunction random_test_function(std::mt19937_64& rng, const Interval& domain) {
    const double len = domain.length();
    const double c = domain.a + len * uniform(rng, 0.2, 0.8);
    const double room = std::min(c - domain.a, domain.b - c) - 0.02 * len;
    const double r = uniform(rng, 0.3, 1.0) * room;
    if (coin(rng, 0.5)) return TestFunction::bump(c, r, uniform(rng, 0.5, 2.0));
    return TestFunction::bump_times(c, r, Polynomial({uniform(rng, 0.5, 1.5), uniform(rng, -1.0, 1.0) / len}));
}

std::vector<CantorBase> random_dictionary(std::mt19937_64& rng) {
    if (coin(rng, 0.5)) return {CantorBase(0.0, 1.0)};
    return {CantorBase(0.1, 0.4), CantorBase(0.6, 0.9)};
}

namespace {

// Placeholders $a and $b stand for variables drawn at random.
constexpr const char* flux_templates[] = {
    "$a", "$a^2", "0.5*$a^2 - $a", "sin($a)", "$a*$b", "exp(0.3*$a)", "atan($a) + 0.5*$b^2", "cos($a)*$b",
    "tanh($a - $b)", "$a^3 / 3",
};

std::string instantiate(const std::string& t, const std::string& a, const std::string& b) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '$') out += t[++i] == 'a' ? a : b;
        else out += t[i];
    }
    return out;
}

BVFunction random_coefficient(std::mt19937_64& rng, const Interval& dom, const std::vector<CantorBase>& dictionary) {
    const int kind = uniform_int(rng, 0, dictionary.empty() ? 1 : 2);
    if (kind == 0) {
        RandomBVOptions opt;
        opt.domain = dom;
        return random_bv(rng, opt);
    }
    if (kind == 1) {
        std::vector<double> nodes;
        const int n = uniform_int(rng, 1, 3);
        for (int i = 0; i < n; ++i) nodes.push_back(dom.a + dom.length() * uniform(rng, 0.1, 0.9));
        sort_unique(nodes);
        std::vector<double> values{uniform(rng, -1.0, 1.0)};
        for (std::size_t i = 0; i < nodes.size(); ++i) values.push_back(values.back() + uniform(rng, -1.5, 1.5));
        return BVFunction::piecewise_constant(dom, nodes, values);
    }
    const auto& base =
        dictionary[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(dictionary.size()) - 1))];
    const double c = uniform(rng, 0.3, 1.5) * (coin(rng, 0.5) ? 1.0 : -1.0);
    const Polynomial p({uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0) / dom.length()});
    return BVFunction(dom, PiecewisePolynomial({dom.a, dom.b}, {p}), {{base, c}});
}

}  // namespace

FluxModel random_flux_model(std::mt19937_64& rng, std::size_t dim, const Interval& domain,
                            const std::vector<CantorBase>& dictionary) {
    std::vector<FluxTerm> terms;
    const int n = uniform_int(rng, 1, 3);
    constexpr int n_templates = static_cast<int>(std::size(flux_templates));
    for (int k = 0; k < n; ++k) {
        const auto var = [&] { return "w" + std::to_string(uniform_int(rng, 0, static_cast<int>(dim) - 1)); };
        const std::string text = instantiate(flux_templates[uniform_int(rng, 0, n_templates - 1)], var(), var());
        terms.push_back({random_coefficient(rng, domain, dictionary), SmoothFunction::parse(text, dim)});
    }
    return FluxModel(std::move(terms));
}

ChainRuleCase random_chain_case(std::mt19937_64& rng, std::size_t test_functions) {
    const Interval dom{0.0, 1.0};
    const auto dictionary = random_dictionary(rng);
    const auto dim = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    ChainRuleCase c;
    c.B = random_flux_model(rng, dim, dom, dictionary);
    RandomBVOptions opt;
    opt.domain = dom;
    opt.dictionary = dictionary;
    opt.cantor_probability = 0.4;
    opt.preferred_nodes = c.B.jump_set();
    std::vector<BVFunction> comps;
    for (std::size_t i = 0; i < dim; ++i) comps.push_back(random_bv(rng, opt));
    c.u = BVVector(std::move(comps));
    for (std::size_t i = 0; i < test_functions; ++i) c.phis.push_back(random_test_function(rng, dom));
    return c;
}

}  // namespace bvcalc
