#include "bvcalc/smooth_function.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bvcalc/errors.hpp"

namespace bvcalc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double pi = std::numbers::pi;

// Enclosure arithmetic, widened by one ulp per operation.

Bounds widen(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi)) throw RepresentationError("enclosure is undefined");
    return {std::nextafter(lo, -inf), std::nextafter(hi, inf)};
}

Bounds operator+(Bounds a, Bounds b) { return widen(a.lo + b.lo, a.hi + b.hi); }
Bounds operator-(Bounds a, Bounds b) { return widen(a.lo - b.hi, a.hi - b.lo); }
Bounds operator-(Bounds a) { return {-a.hi, -a.lo}; }

Bounds operator*(Bounds a, Bounds b) {
    const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return widen(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Bounds operator/(Bounds a, Bounds b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) throw RepresentationError("enclosure divides by an interval containing 0");
    return a * widen(1.0 / b.hi, 1.0 / b.lo);
}

Bounds powi(Bounds a, int n) {
    if (n < 0) return Bounds::point(1.0) / powi(a, -n);
    if (n == 0) return Bounds::point(1.0);
    const double l = std::pow(a.lo, n), h = std::pow(a.hi, n);
    if (n % 2 == 1) return widen(l, h);
    if (a.lo <= 0.0 && a.hi >= 0.0) return widen(0.0, std::max(l, h));
    return widen(std::min(l, h), std::max(l, h));
}

Bounds exp(Bounds a) { return widen(std::exp(a.lo), std::exp(a.hi)); }
Bounds tanh(Bounds a) { return widen(std::tanh(a.lo), std::tanh(a.hi)); }
Bounds atan(Bounds a) { return widen(std::atan(a.lo), std::atan(a.hi)); }

// sin over [lo, hi] attains +1 at pi/2 + 2k pi and -1 at -pi/2 + 2k pi.
Bounds sin(Bounds a) {
    if (a.hi - a.lo >= 2.0 * pi) return {-1.0, 1.0};
    double lo = std::min(std::sin(a.lo), std::sin(a.hi)), hi = std::max(std::sin(a.lo), std::sin(a.hi));
    auto hits = [&](double phase) { return std::floor((a.hi - phase) / (2.0 * pi)) >= std::ceil((a.lo - phase) / (2.0 * pi)); };
    if (hits(0.5 * pi)) hi = 1.0;
    if (hits(-0.5 * pi)) lo = -1.0;
    return widen(std::max(-1.0, lo), std::min(1.0, hi));
}

Bounds cos(Bounds a) { return sin(a + Bounds::point(0.5 * pi)); }

double powi(double a, int n) { return std::pow(a, n); }

template <class T>
struct Dual {
    T v;
    T d;
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

template <class T>
T lift(double c) {
    if constexpr (std::is_same_v<T, Bounds>) return Bounds::point(c);
    else return T(c);
}

template <class T>
Dual<T> powi(const Dual<T>& a, int n) {
    if (n == 0) return {lift<T>(1.0), lift<T>(0.0)};
    return {powi(a.v, n), lift<T>(static_cast<double>(n)) * powi(a.v, n - 1) * a.d};
}

using std::atan;
using std::cos;
using std::exp;
using std::sin;
using std::tanh;

template <class T>
Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -(sin(a.v) * a.d)}; }
template <class T>
Dual<T> exp(const Dual<T>& a) {
    const T e = exp(a.v);
    return {e, e * a.d};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
    const T t = tanh(a.v);
    return {t, (lift<T>(1.0) - powi(t, 2)) * a.d};
}
template <class T>
Dual<T> atan(const Dual<T>& a) { return {atan(a.v), a.d / (lift<T>(1.0) + powi(a.v, 2))}; }

template <class T>
struct Lift {
    static T constant(double c) { return lift<T>(c); }
};
template <class T>
struct Lift<Dual<T>> {
    static Dual<T> constant(double c) { return {lift<T>(c), lift<T>(0.0)}; }
};

enum class Op { constant, variable, add, sub, mul, div, neg, powi, sin, cos, exp, tanh, atan };

struct Instr {
    Op op;
    double c = 0.0;
    int i = 0;
};

constexpr std::size_t max_stack = 64;

}  // namespace

struct SmoothFunction::Program {
    std::vector<Instr> code;

    template <class T, class Var>
    T run(const Var& var) const {
        std::array<T, max_stack> s;
        std::size_t top = 0;
        for (const Instr& in : code) {
            switch (in.op) {
                case Op::constant: s[top++] = Lift<T>::constant(in.c); break;
                case Op::variable: s[top++] = var(static_cast<std::size_t>(in.i)); break;
                case Op::add: --top; s[top - 1] = s[top - 1] + s[top]; break;
                case Op::sub: --top; s[top - 1] = s[top - 1] - s[top]; break;
                case Op::mul: --top; s[top - 1] = s[top - 1] * s[top]; break;
                case Op::div: --top; s[top - 1] = s[top - 1] / s[top]; break;
                case Op::neg: s[top - 1] = -s[top - 1]; break;
                case Op::powi: s[top - 1] = powi(s[top - 1], in.i); break;
                case Op::sin: s[top - 1] = sin(s[top - 1]); break;
                case Op::cos: s[top - 1] = cos(s[top - 1]); break;
                case Op::exp: s[top - 1] = exp(s[top - 1]); break;
                case Op::tanh: s[top - 1] = tanh(s[top - 1]); break;
                case Op::atan: s[top - 1] = atan(s[top - 1]); break;
            }
        }
        return s[0];
    }
};

namespace {

class Parser {
public:
    using Names = std::vector<std::pair<std::string, int>>;

    Parser(std::string_view text, const Names& vars, std::vector<Instr>& out)
        : s_(text), vars_(vars), out_(out) {}

    void parse() {
        expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
    }

    std::size_t max_depth() const {
        std::size_t depth = 0, top = 0;
        for (const Instr& in : out_) {
            switch (in.op) {
                case Op::constant:
                case Op::variable: ++top; break;
                case Op::add:
                case Op::sub:
                case Op::mul:
                case Op::div: --top; break;
                default: break;
            }
            depth = std::max(depth, top);
        }
        return depth;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "expression '" << s_ << "': " << what << " at column " << pos_ + 1;
        throw PreconditionError(os.str());
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Op op, double c = 0.0, int i = 0) { out_.push_back({op, c, i}); }

    void expr() {
        term();
        for (;;) {
            if (eat('+')) { term(); emit(Op::add); }
            else if (eat('-')) { term(); emit(Op::sub); }
            else return;
        }
    }

    void term() {
        unary();
        for (;;) {
            if (eat('*')) { unary(); emit(Op::mul); }
            else if (eat('/')) { unary(); emit(Op::div); }
            else return;
        }
    }

    void unary() {
        if (eat('-')) { unary(); emit(Op::neg); return; }
        if (eat('+')) { unary(); return; }
        power();
    }

    void power() {
        primary();
        if (!eat('^')) return;
        skip();
        int sign = 1;
        if (eat('-')) sign = -1;
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_ || (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')))
            fail("exponent must be an integer literal");
        emit(Op::powi, 0.0, sign * std::stoi(std::string(s_.substr(start, pos_ - start))));
    }

    void primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (eat('(')) {
            expr();
            if (!eat(')')) fail("missing ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(s_.substr(pos_));
            std::size_t used = 0;
            const double v = std::stod(rest, &used);
            pos_ += used;
            emit(Op::constant, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name(s_.substr(start, pos_ - start));
            for (const auto& [vname, index] : vars_)
                if (vname == name) {
                    emit(Op::variable, 0.0, index);
                    return;
                }
            if (name == "pi") {
                emit(Op::constant, pi);
                return;
            }
            static const std::pair<const char*, Op> functions[] = {
                {"sin", Op::sin}, {"cos", Op::cos}, {"exp", Op::exp}, {"tanh", Op::tanh}, {"atan", Op::atan}};
            for (const auto& [fname, op] : functions)
                if (name == fname) {
                    if (!eat('(')) fail("expected '(' after " + name);
                    expr();
                    if (!eat(')')) fail("missing ')'");
                    emit(op);
                    return;
                }
            pos_ = start;
            fail("unknown name '" + name + "'");
        }
        fail("unexpected character");
    }

    std::string_view s_;
    const Names& vars_;
    std::vector<Instr>& out_;
    std::size_t pos_ = 0;
};

}  // namespace

double Bounds::mag() const { return std::max(std::abs(lo), std::abs(hi)); }

namespace {

SmoothFunction compile(std::string_view text, const Parser::Names& names, std::size_t dim) {
    auto prog = std::make_shared<SmoothFunction::Program>();
    Parser p(text, names, prog->code);
    p.parse();
    if (p.max_depth() > max_stack) throw PreconditionError("expression nests too deeply");
    return SmoothFunction::from_program(std::move(prog), dim, std::string(text));
}

}  // namespace

SmoothFunction SmoothFunction::parse(std::string_view text, std::size_t dim) {
    if (dim == 0) throw PreconditionError("smooth function needs at least one variable");
    Parser::Names names;
    for (std::size_t i = 0; i < dim; ++i) names.emplace_back("w" + std::to_string(i), static_cast<int>(i));
    if (dim == 1) {
        names.emplace_back("w", 0);
        names.emplace_back("u", 0);
    }
    return compile(text, names, dim);
}

SmoothFunction SmoothFunction::parse(std::string_view text, std::vector<std::string> variables) {
    Parser::Names names;
    for (std::size_t i = 0; i < variables.size(); ++i) names.emplace_back(variables[i], static_cast<int>(i));
    return compile(text, names, variables.size());
}

SmoothFunction SmoothFunction::from_program(std::shared_ptr<const Program> program, std::size_t dim, std::string text) {
    SmoothFunction f;
    f.program_ = std::move(program);
    f.dim_ = dim;
    f.text_ = std::move(text);
    return f;
}

SmoothFunction SmoothFunction::constant(double c, std::size_t dim) {
    std::ostringstream os;
    os.precision(17);
    os << c;
    return parse(os.str(), dim);
}

double SmoothFunction::operator()(std::span<const double> w) const {
    if (w.size() != dim_) throw PreconditionError("argument dimension mismatch");
    return program_->run<double>([&](std::size_t i) { return w[i]; });
}

double SmoothFunction::partial(std::span<const double> w, std::size_t k) const {
    if (w.size() != dim_) throw PreconditionError("argument dimension mismatch");
    return program_->run<Dual<double>>([&](std::size_t i) { return Dual<double>{w[i], i == k ? 1.0 : 0.0}; }).d;
}

void SmoothFunction::gradient_into(std::span<const double> w, std::span<double> out) const {
    for (std::size_t k = 0; k < dim_; ++k) out[k] = partial(w, k);
}

std::vector<double> SmoothFunction::gradient(std::span<const double> w) const {
    std::vector<double> g(dim_);
    gradient_into(w, g);
    return g;
}

Bounds SmoothFunction::range(std::span<const Bounds> box) const {
    if (box.size() != dim_) throw PreconditionError("box dimension mismatch");
    return program_->run<Bounds>([&](std::size_t i) { return box[i]; });
}

Bounds SmoothFunction::partial_range(std::span<const Bounds> box, std::size_t k) const {
    if (box.size() != dim_) throw PreconditionError("box dimension mismatch");
    return program_
        ->run<Dual<Bounds>>([&](std::size_t i) { return Dual<Bounds>{box[i], Bounds::point(i == k ? 1.0 : 0.0)}; })
        .d;
}

double SmoothFunction::lipschitz(std::span<const Bounds> box) const {
    double s = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) s += std::pow(partial_range(box, k).mag(), 2);
    return std::nextafter(std::sqrt(s), inf);
}

}  // namespace bvcalc
