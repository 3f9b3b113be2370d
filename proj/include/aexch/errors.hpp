#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aexch {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature stopped short of the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(what), achieved_tolerance(achieved) {}

    double achieved_tolerance;
};

/// A power or exponential would overflow; the message names the offending
/// support edge.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// The operation requires a different phase (stable vs condensing).
class PhaseError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration ran out of iterations; carries the residual history.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), residual_history(std::move(history)) {}

    std::vector<double> residual_history;
};

/// Malformed configuration; carries the offending key when known.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string key_ = {})
        : Error(what), key(std::move(key_)) {}

    std::string key;
};

/// Not enough data for the requested estimate.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

} // namespace aexch
