#pragma once

#include <stdexcept>
#include <string>

namespace escape {

// Input/model errors: condition the caller could have checked (exit code 2 in the CLI).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures: iteration caps, non-convergence (exit code 3 in the CLI).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPrimitiveError : ValidationError {
    explicit NotPrimitiveError(const std::string& msg) : ValidationError(msg) {}
};

struct EmptyRowOrColError : ValidationError {
    explicit EmptyRowOrColError(const std::string& msg) : ValidationError(msg) {}
};

// Requested enumeration would exceed the configured word cap.
struct LengthOverflowError : ValidationError {
    explicit LengthOverflowError(const std::string& msg) : ValidationError(msg) {}
};

struct NotCyclicallyAdmissibleError : ValidationError {
    explicit NotCyclicallyAdmissibleError(const std::string& msg) : ValidationError(msg) {}
};

struct InvalidPeriodicPointError : ValidationError {
    explicit InvalidPeriodicPointError(const std::string& msg) : ValidationError(msg) {}
};

struct DepthMismatchError : ValidationError {
    explicit DepthMismatchError(const std::string& msg) : ValidationError(msg) {}
};

// Lower step roof hit zero: delta too coarse for the roof.
struct NonPositiveLowerError : ValidationError {
    explicit NonPositiveLowerError(const std::string& msg) : ValidationError(msg) {}
};

// No (m, delta) pair satisfies the discretization feasibility constraint.
struct InfeasibleError : ValidationError {
    explicit InfeasibleError(const std::string& msg) : ValidationError(msg) {}
};

// A point described by a finite prefix was evaluated past its known symbols.
struct PrefixExhaustedError : ValidationError {
    explicit PrefixExhaustedError(const std::string& msg) : ValidationError(msg) {}
};

struct NoConvergenceError : NumericalError {
    explicit NoConvergenceError(const std::string& msg) : NumericalError(msg) {}
};

struct ConfigError : ValidationError {
    explicit ConfigError(const std::string& msg) : ValidationError(msg) {}
};

}  // namespace escape
