#include "bvcalc/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace bvcalc {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string name;
    int index = -1;
    int line = 0;
    std::vector<Entry> entries;

    std::string label() const {
        if (name.empty()) return "top level";
        return "[" + name + (index >= 0 ? "." + std::to_string(index) : "") + "]";
    }
};

std::string trim(std::string_view s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return std::string(s.substr(lo, hi - lo));
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

class Fields {
public:
    Fields(const Section& s, const std::string& source, const std::set<std::string>& allowed)
        : s_(s), source_(source) {
        for (const auto& e : s.entries)
            if (!allowed.contains(e.key)) fail(e.line, "unknown field '" + e.key + "'");
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ScenarioError(source_ + ":" + std::to_string(line) + ": " + s_.label() + ": " + msg);
    }
    [[noreturn]] void missing(const std::string& key) const {
        fail(s_.line, "missing field '" + key + "'");
    }

    const Entry* one(const std::string& key) const {
        const Entry* found = nullptr;
        for (const auto& e : s_.entries) {
            if (e.key != key) continue;
            if (found) fail(e.line, "field '" + key + "' given twice");
            found = &e;
        }
        return found;
    }
    std::vector<const Entry*> all(const std::string& key) const {
        std::vector<const Entry*> out;
        for (const auto& e : s_.entries)
            if (e.key == key) out.push_back(&e);
        return out;
    }
    const Entry& require(const std::string& key) const {
        const Entry* e = one(key);
        if (!e) missing(key);
        return *e;
    }

    double to_number(const Entry& e, const std::string& token) const {
        double v = 0.0;
        const char* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), end, v, std::chars_format::general);
        if (ec != std::errc() || ptr != end || !std::isfinite(v))
            fail(e.line, "field '" + e.key + "': '" + token + "' is not a decimal number");
        return v;
    }
    std::vector<double> numbers(const Entry& e, std::size_t min_count, std::size_t max_count) const {
        std::vector<double> out;
        for (const auto& t : tokens(e.value)) out.push_back(to_number(e, t));
        if (out.size() < min_count || out.size() > max_count) {
            std::string want = std::to_string(min_count);
            if (max_count == std::size_t(-1)) want += " or more";
            else if (max_count != min_count) want += " to " + std::to_string(max_count);
            fail(e.line, "field '" + e.key + "' expects " + want + " numbers, got " + std::to_string(out.size()));
        }
        return out;
    }
    double number(const Entry& e) const { return numbers(e, 1, 1)[0]; }
    long long integer(const Entry& e, long long lo, long long hi) const {
        const std::string t = trim(e.value);
        long long v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size())
            fail(e.line, "field '" + e.key + "': '" + t + "' is not an integer");
        if (v < lo || v > hi)
            fail(e.line, "field '" + e.key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    const Section& section() const { return s_; }

private:
    const Section& s_;
    const std::string& source_;
};

constexpr std::size_t many = std::size_t(-1);

std::vector<Section> split_sections(std::string_view text, const std::string& source) {
    std::vector<Section> out(1);
    out[0].line = 1;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ScenarioError(where + "unterminated section header");
            std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            Section s;
            s.line = line_no;
            if (auto dot = name.find('.'); dot != std::string::npos) {
                const std::string idx = name.substr(dot + 1);
                int v = 0;
                auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
                if (ec != std::errc() || ptr != idx.data() + idx.size() || v < 1)
                    throw ScenarioError(where + "section index '" + idx + "' must be a positive integer");
                s.index = v;
                name = name.substr(0, dot);
            }
            s.name = name;
            out.push_back(std::move(s));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ScenarioError(where + "expected 'key = value' or a [section] header");
        Entry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
        if (e.key.empty()) throw ScenarioError(where + "empty field name");
        if (e.value.empty()) throw ScenarioError(where + "field '" + e.key + "' has no value");
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

/// Builds a closed-form BV function from "<prefix>breaks", "<prefix>piece"
/// and "<prefix>cantor" fields.
BVFunction build_bv(const Fields& f, const std::string& prefix, const Interval& domain,
                    RepresentativePolicy policy = {}) {
    std::vector<double> breaks{domain.a};
    int breaks_line = f.section().line;
    if (const Entry* e = f.one(prefix + "breaks")) {
        breaks_line = e->line;
        for (double x : f.numbers(*e, 1, many)) {
            if (!domain.contains_open(x)) f.fail(e->line, "breakpoint " + trim(e->value) + " outside the open domain");
            if (x <= breaks.back()) f.fail(e->line, "breakpoints must increase strictly");
            breaks.push_back(x);
        }
    }
    breaks.push_back(domain.b);

    const auto pieces = f.all(prefix + "piece");
    if (pieces.empty()) f.missing(prefix + "piece");
    if (pieces.size() != breaks.size() - 1)
        f.fail(breaks_line, std::to_string(breaks.size() - 2) + " breakpoints need " +
                                std::to_string(breaks.size() - 1) + " '" + prefix + "piece' fields, got " +
                                std::to_string(pieces.size()));
    std::vector<Polynomial> polys;
    for (const Entry* e : pieces) polys.emplace_back(f.numbers(*e, 1, many));

    std::vector<CantorComponent> cantor;
    for (const Entry* e : f.all(prefix + "cantor")) {
        const auto v = f.numbers(*e, 3, 3);
        if (!(v[0] < v[1]) || v[0] < domain.a || v[1] > domain.b)
            f.fail(e->line, "Cantor support must satisfy a <= lo < hi <= b");
        cantor.push_back({CantorBase(v[0], v[1]), v[2]});
    }
    try {
        return BVFunction(domain, PiecewisePolynomial(std::move(breaks), std::move(polys)), std::move(cantor), policy);
    } catch (const std::exception& ex) {
        f.fail(f.section().line, ex.what());
    }
}

RepresentativePolicy parse_policy(const Fields& f, const Entry& e) {
    const std::string v = trim(e.value);
    if (v == "precise") return RepresentativePolicy::precise();
    if (v == "left") return RepresentativePolicy::left();
    if (v == "right") return RepresentativePolicy::right();
    const double theta = f.number(e);
    if (theta < 0.0 || theta > 1.0) f.fail(e.line, "policy theta must lie in [0, 1]");
    return RepresentativePolicy::with_theta(theta);
}

TestFunction parse_bump(const Fields& f, const Entry& e, const Interval& domain, bool times) {
    const auto v = f.numbers(e, 2, times ? many : 3);
    const double c = v[0], r = v[1];
    if (!(r > 0.0) || !(c - r > domain.a) || !(c + r < domain.b))
        f.fail(e.line, "support [c - r, c + r] must lie inside the open domain");
    if (times) return TestFunction::bump_times(c, r, Polynomial(std::vector<double>(v.begin() + 2, v.end())));
    return TestFunction::bump(c, r, v.size() == 3 ? v[2] : 1.0);
}

std::optional<ScenarioKind> kind_from(std::string_view s) {
    for (auto k : {ScenarioKind::chainrule_verify, ScenarioKind::approx_demo, ScenarioKind::coarea_check,
                   ScenarioKind::claw_run, ScenarioKind::entropy_check, ScenarioKind::comparison_check})
        if (kind_name(k) == s) return k;
    return std::nullopt;
}

std::string stem_of(const std::string& source) {
    std::string s = source;
    if (auto slash = s.find_last_of('/'); slash != std::string::npos) s = s.substr(slash + 1);
    if (auto dot = s.find_last_of('.'); dot != std::string::npos && dot > 0) s = s.substr(0, dot);
    return s;
}

}  // namespace

std::string_view kind_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::chainrule_verify: return "chainrule-verify";
        case ScenarioKind::approx_demo: return "approx-demo";
        case ScenarioKind::coarea_check: return "coarea-check";
        case ScenarioKind::claw_run: return "claw-run";
        case ScenarioKind::entropy_check: return "entropy-check";
        case ScenarioKind::comparison_check: return "comparison-check";
    }
    return "?";
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
    const auto sections = split_sections(text, source);
    Scenario sc;
    sc.source = source;

    const Fields top(sections[0], source, {"kind", "id", "domain", "tol", "seed"});
    {
        const Entry& k = top.require("kind");
        const auto kind = kind_from(trim(k.value));
        if (!kind) top.fail(k.line, "field 'kind': unknown scenario kind '" + trim(k.value) + "'");
        sc.kind = *kind;
        const Entry* id = top.one("id");
        sc.id = id ? trim(id->value) : stem_of(source);
        if (sc.id.find_first_of(",\"\n") != std::string::npos) top.fail(id->line, "field 'id' may not contain commas");
        if (const Entry* d = top.one("domain")) {
            const auto v = top.numbers(*d, 2, 2);
            if (!(v[0] < v[1])) top.fail(d->line, "field 'domain' needs a < b");
            sc.domain = Interval(v[0], v[1]);
        }
        if (const Entry* t = top.one("tol")) {
            sc.tol = top.number(*t);
            if (!(sc.tol > 0.0)) top.fail(t->line, "field 'tol' must be positive");
        }
        if (const Entry* s = top.one("seed"))
            sc.seed = static_cast<std::uint64_t>(top.integer(*s, 0, std::numeric_limits<long long>::max()));
    }

    std::map<int, const Section*> flux_sections, u_sections;
    std::map<std::string, const Section*> singles;
    for (std::size_t i = 1; i < sections.size(); ++i) {
        const Section& s = sections[i];
        const std::string where = source + ":" + std::to_string(s.line) + ": ";
        if (s.name == "flux" || s.name == "u") {
            if (s.index < 0) throw ScenarioError(where + "section [" + s.name + "] needs an index, e.g. [" + s.name + ".1]");
            auto& m = s.name == "flux" ? flux_sections : u_sections;
            if (!m.emplace(s.index, &s).second) throw ScenarioError(where + "duplicate section " + s.label());
        } else if (s.name == "test_functions" || s.name == "random" || s.name == "claw" || s.name == "approx" ||
                   s.name == "coarea") {
            if (s.index >= 0) throw ScenarioError(where + "section [" + s.name + "] takes no index");
            if (!singles.emplace(s.name, &s).second) throw ScenarioError(where + "duplicate section " + s.label());
        } else {
            throw ScenarioError(where + "unknown section [" + s.name + "]");
        }
    }

    int expected = 1;
    for (const auto& [idx, s] : u_sections) {
        const Fields f(*s, source, {"breaks", "piece", "cantor", "policy"});
        if (idx != expected) f.fail(s->line, "components must be numbered 1, 2, ... without gaps");
        ++expected;
        RepresentativePolicy policy;
        if (const Entry* p = f.one("policy")) policy = parse_policy(f, *p);
        sc.u.push_back(build_bv(f, "", sc.domain, policy));
    }
    const std::size_t dim = sc.u.empty() ? 1 : sc.u.size();

    if (!flux_sections.empty()) {
        std::vector<FluxTerm> terms;
        for (const auto& [idx, s] : flux_sections) {
            const Fields f(*s, source, {"K.breaks", "K.piece", "K.cantor", "f"});
            const Entry& fe = f.require("f");
            FluxTerm t;
            t.K = build_bv(f, "K.", sc.domain);
            try {
                t.f = SmoothFunction::parse(fe.value, dim);
            } catch (const std::exception& ex) {
                f.fail(fe.line, "field 'f': " + std::string(ex.what()));
            }
            terms.push_back(std::move(t));
        }
        try {
            sc.flux = FluxModel(std::move(terms));
        } catch (const std::exception& ex) {
            throw ScenarioError(source + ":" + std::to_string(flux_sections.begin()->second->line) + ": [flux]: " +
                                ex.what());
        }
    }

    if (auto it = singles.find("test_functions"); it != singles.end()) {
        const Fields f(*it->second, source, {"bump", "bump_times", "random"});
        for (const auto& e : it->second->entries) {
            if (e.key == "random") {
                sc.random_test_functions = static_cast<int>(f.integer(e, 0, 1000));
            } else {
                sc.test_functions.push_back(parse_bump(f, e, sc.domain, e.key == "bump_times"));
            }
        }
    }
    if (auto it = singles.find("random"); it != singles.end()) {
        const Fields f(*it->second, source, {"cases", "test_functions"});
        sc.random.cases = static_cast<int>(f.integer(f.require("cases"), 1, 100000));
        if (const Entry* e = f.one("test_functions")) sc.random.test_functions = static_cast<int>(f.integer(*e, 1, 1000));
    }
    if (auto it = singles.find("claw"); it != singles.end()) {
        const Fields f(*it->second, source,
                       {"range", "T", "cells", "cfl", "samples", "field", "alphas", "convex", "N", "phi_x", "phi_t"});
        auto& c = sc.claw;
        const auto r = f.numbers(f.require("range"), 2, 2);
        if (!(r[0] < r[1])) f.fail(f.require("range").line, "field 'range' needs lo < hi");
        c.range = Bounds{r[0], r[1]};
        c.T = f.number(f.require("T"));
        if (!(c.T > 0.0)) f.fail(f.require("T").line, "field 'T' must be positive");
        c.cells = static_cast<int>(f.integer(f.require("cells"), 4, 1000000));
        if (const Entry* e = f.one("cfl")) c.cfl = f.number(*e);
        if (const Entry* e = f.one("samples")) c.samples = static_cast<int>(f.integer(*e, 2, 100000));
        if (const Entry* e = f.one("field")) {
            const std::string v = trim(e->value);
            if (v != "yes" && v != "no") f.fail(e->line, "field 'field' must be yes or no");
            c.write_field = v == "yes";
        }
        if (const Entry* e = f.one("alphas")) c.alphas = static_cast<int>(f.integer(*e, 0, 1000));
        for (const Entry* e : f.all("convex")) {
            try {
                c.convex.push_back(SmoothFunction::parse(e->value, 1));
            } catch (const std::exception& ex) {
                f.fail(e->line, "field 'convex': " + std::string(ex.what()));
            }
        }
        if (const Entry* e = f.one("N")) c.affine_N = static_cast<int>(f.integer(*e, 0, 100000));
        if (const Entry* e = f.one("phi_x")) c.phi_x = parse_bump(f, *e, sc.domain, false);
        if (const Entry* e = f.one("phi_t")) {
            const auto v = f.numbers(*e, 2, 3);
            if (!(v[1] > 0.0) || !(v[0] - v[1] > 0.0) || !(v[0] + v[1] < c.T))
                f.fail(e->line, "time support [c - r, c + r] must lie inside ]0, T[");
            c.phi_t = TestFunction::bump(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
        }
    }
    if (auto it = singles.find("approx"); it != singles.end()) {
        const Fields f(*it->second, source, {"eps", "P", "P_eps", "samples"});
        const Entry& e = f.require("eps");
        sc.approx.eps = f.numbers(e, 1, many);
        for (double v : sc.approx.eps)
            if (!(v > 0.0)) f.fail(e.line, "field 'eps' values must be positive");
        if (const Entry* p = f.one("P")) sc.approx.P = f.numbers(*p, 1, many);
        if (const Entry* p = f.one("P_eps")) {
            sc.approx.P_eps = static_cast<std::size_t>(f.integer(*p, 0, static_cast<long long>(sc.approx.P.size())));
        }
        if (const Entry* s = f.one("samples")) sc.approx.samples = static_cast<int>(f.integer(*s, 2, 10000000));
    }
    if (auto it = singles.find("coarea"); it != singles.end()) {
        const Fields f(*it->second, source, {"g"});
        const Entry& e = f.require("g");
        try {
            sc.coarea.g = SmoothFunction::parse(e.value, std::vector<std::string>{"x"});
        } catch (const std::exception& ex) {
            f.fail(e.line, "field 'g': " + std::string(ex.what()));
        }
    }
    if (sc.coarea.g.empty()) sc.coarea.g = SmoothFunction::constant(1.0, 1);

    auto need = [&](bool ok, const std::string& field, const std::string& what) {
        if (!ok)
            throw ScenarioError(source + ": missing field '" + field + "' (" + what + ") required by kind " +
                                std::string(kind_name(sc.kind)));
    };
    auto scalar = [&](const std::string& what) {
        if (sc.u.size() > 1)
            throw ScenarioError(source + ": kind " + std::string(kind_name(sc.kind)) + " takes a scalar " + what +
                                ", got " + std::to_string(sc.u.size()) + " [u.N] sections");
    };
    const bool has_tests = !sc.test_functions.empty() || sc.random_test_functions > 0;
    switch (sc.kind) {
        case ScenarioKind::chainrule_verify:
            if (sc.random.cases > 0 && !sc.flux && sc.u.empty()) break;
            need(sc.flux.has_value(), "flux", "a [flux.N] section with K and f");
            need(!sc.u.empty(), "u", "a [u.N] section per component");
            need(has_tests, "test_functions", "a [test_functions] section");
            break;
        case ScenarioKind::comparison_check:
            need(sc.flux.has_value(), "flux", "a [flux.N] section with K and f");
            need(!sc.u.empty(), "u", "a [u.1] section");
            need(has_tests, "test_functions", "a [test_functions] section");
            scalar("u");
            break;
        case ScenarioKind::coarea_check:
            need(!sc.u.empty(), "u", "a [u.1] section");
            scalar("u");
            break;
        case ScenarioKind::approx_demo:
            need(!sc.u.empty(), "u", "a [u.N] section per component");
            need(!sc.approx.eps.empty(), "approx", "an [approx] section with eps");
            break;
        case ScenarioKind::claw_run:
        case ScenarioKind::entropy_check:
            need(sc.flux.has_value(), "flux", "a [flux.N] section with K and f");
            need(!sc.u.empty(), "u", "the initial datum as [u.1]");
            need(sc.claw.range.has_value(), "claw", "a [claw] section with range, T and cells");
            scalar("initial datum");
            break;
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot read scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

}  // namespace bvcalc
