#pragma once

#include <stdexcept>
#include <string>

namespace qddlab {

// Invalid argument for a mathematical operation (bad index, nonpositive density, size mismatch).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Quantity outside the representable range (e.g. exp overflow of a potential).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

// Operation not defined for the given variant of an input.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Invalid or inconsistent configuration. key() names the offending setting, if any.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Numerical failure: solver breakdown, Newton non-convergence.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& message, double residual)
        : std::runtime_error(message), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace qddlab
