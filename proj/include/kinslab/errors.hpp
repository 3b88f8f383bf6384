#pragma once

#include <stdexcept>
#include <string>

namespace kinslab {

/// Invalid user-supplied parameters. Maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver breakdown: non-finite values, singular systems, positivity loss. Exit status 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (shape mismatch, unclosed trace, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace kinslab
