#pragma once

#include <stdexcept>
#include <string>

namespace patr {

// Model or operator parameters outside their admissible domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Requested combination is not defined for the model (e.g. an unsupported
// correction order, or a threshold formula the model does not have).
class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Exponential growth of a complex-argument kernel would overflow doubles.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// Non-finite intermediate results or violated numeric postconditions.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace patr
