#pragma once

#include <stdexcept>
#include <string>

namespace stoprule {

/// Malformed or out-of-range input (bad probabilities, length mismatch, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A theorem's hypotheses do not hold for the supplied model.
class AssumptionViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A formula would divide by zero or leave its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input the implementation refuses by construction (e.g. infinite odds in a product table).
class UnsupportedInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exhaustive oracles have hard size caps.
class GuardExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidInput(what);
}

}  // namespace detail
}  // namespace stoprule
