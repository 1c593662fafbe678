#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bvcalc {

/// Closed real interval used for enclosures; lo may equal hi.
struct Bounds {
    double lo = 0.0;
    double hi = 0.0;

    static Bounds point(double x) { return {x, x}; }
    double mag() const;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// C^1 map R^d -> R given by an expression.
///
/// Grammar: numbers, the variables of the function, + - * /, ^ with an
/// integer literal exponent, parentheses, sin cos exp tanh atan and the
/// constant pi. Values, gradients and interval enclosures of both all come
/// from the same compiled program.
class SmoothFunction {
public:
    SmoothFunction() = default;

    /// Variables w0 .. w{d-1}; with d = 1 also w and u.
    static SmoothFunction parse(std::string_view text, std::size_t dim);
    /// Variables named explicitly, in argument order.
    static SmoothFunction parse(std::string_view text, std::vector<std::string> variables);
    static SmoothFunction constant(double c, std::size_t dim);

    std::size_t dim() const { return dim_; }
    const std::string& text() const { return text_; }
    bool empty() const { return !program_; }

    double operator()(std::span<const double> w) const;
    double operator()(double w) const { return (*this)(std::span<const double>(&w, 1)); }
    double partial(std::span<const double> w, std::size_t i) const;
    void gradient_into(std::span<const double> w, std::span<double> out) const;
    std::vector<double> gradient(std::span<const double> w) const;
    double derivative(double w) const { return partial(std::span<const double>(&w, 1), 0); }

    /// Enclosure of the values over a box.
    Bounds range(std::span<const Bounds> box) const;
    /// Enclosure of one partial derivative over a box.
    Bounds partial_range(std::span<const Bounds> box, std::size_t i) const;
    /// Upper bound for the Euclidean norm of the gradient over a box.
    double lipschitz(std::span<const Bounds> box) const;

    struct Program;
    static SmoothFunction from_program(std::shared_ptr<const Program> program, std::size_t dim, std::string text);

private:
    std::shared_ptr<const Program> program_;
    std::size_t dim_ = 0;
    std::string text_;
};

}  // namespace bvcalc
