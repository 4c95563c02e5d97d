#pragma once

#include <stdexcept>
#include <string>

namespace mvm {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A vector is used with a support set it was not built on.
struct AlignmentError : Error { using Error::Error; };

/// A user-supplied callable produced a non-finite value.
struct EvaluationError : Error { using Error::Error; };

/// Invalid argument values (sizes, ranges, unknown switches).
struct ArgumentError : Error { using Error::Error; };

/// Numerical breakdown inside a simulation or solver.
struct NumericalError : Error { using Error::Error; };

/// Operation restricted to one-dimensional supports.
struct DimensionError : Error { using Error::Error; };

/// Malformed or inconsistent configuration input.
struct ConfigError : Error { using Error::Error; };

/// A grid node at which no control in the problem's list is feasible.
struct InfeasibleNodeError : Error { using Error::Error; };

} // namespace mvm
