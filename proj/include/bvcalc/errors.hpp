#pragma once

#include <stdexcept>
#include <string>

namespace bvcalc {

/// Argument outside the admissible domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested object is not expressible in the closed-form classes.
class RepresentationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical integration could not meet its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value requested from an inverse map is not attained.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

}  // namespace bvcalc
