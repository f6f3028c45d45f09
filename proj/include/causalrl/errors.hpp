#ifndef CAUSALRL_ERRORS_HPP
#define CAUSALRL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace causalrl {

// Operand shapes do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A precondition on the call itself was violated (bad index, bad count, cyclic input...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed or unreadable input data.
class IngestionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration rejected before any work started.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown during training (non-finite loss etc).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace causalrl

#endif  // CAUSALRL_ERRORS_HPP
