/// @file errors.hpp
/// @brief Exception types shared by all modules.
///
/// The CLI maps these onto its exit-code contract: InvariantViolation -> 2,
/// everything configuration- or input-related -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace carroll {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

/// Query outside the admissible region sigma > |beta| (the flux is singular on beta = +-sigma).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

/// Invalid numeric parameter (non-positive c0, delta, epsilon, ...).
class ParameterError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "parameter_error"; }
};

/// A test-function pair outside A x B.
class AdmissibilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "admissibility_error"; }
};

/// Adaptive quadrature failed to reach its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical_error"; }
};

/// Bad solver or experiment configuration (including dt underflow).
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

/// Bad analysis input (empty trajectory, support violation, ...).
class InputError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "input_error"; }
};

/// The state left the invariant region {w1, w2 >= c0}.
class InvariantViolation : public Error {
public:
    InvariantViolation(const std::string& what, int cell, double time)
        : Error(what), cell_(cell), time_(time) {}
    const char* kind() const noexcept override { return "invariant_violation"; }
    int cell() const noexcept { return cell_; }
    double time() const noexcept { return time_; }

private:
    int cell_;
    double time_;
};

}  // namespace carroll
