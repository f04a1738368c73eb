#pragma once

#include <stdexcept>
#include <string>

namespace eblab {

/// Base class for all library errors. Subclasses identify the failure mode;
/// the CLI maps them onto exit codes.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input outside the mathematical domain of an operation (wrong side of a
/// chart, boundary point with no interior preimage, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Least-squares order fit rejected: too few samples or residual too large.
struct FitError : Error {
  using Error::Error;
};

/// Finite-difference step underflow or invalid step request.
struct StepError : Error {
  using Error::Error;
};

/// Adaptive integrator could not take a step above the minimum size.
struct StepFailure : Error {
  using Error::Error;
};

/// Trajectory left the base coordinate chart and no continuation applies.
struct ChartExit : Error {
  using Error::Error;
};

/// Compactified fiber coordinates left the validity region of their chart.
struct FiberChartError : Error {
  using Error::Error;
};

/// Point handed to a linearization routine is not a critical point.
struct NotCritical : Error {
  using Error::Error;
};

/// Both the symbol value and the component discriminant are below tolerance.
struct ToleranceAmbiguous : Error {
  using Error::Error;
};

/// Unknown tag passed to the threshold evaluator.
struct UnknownTheoremTag : Error {
  using Error::Error;
};

/// A requested run violates a weight/order threshold inequality.
struct ThresholdViolation : Error {
  using Error::Error;
};

/// Explicit marching scheme would be unstable on the requested grid.
struct CFLViolation : Error {
  using Error::Error;
};

/// Mode/dimension combination not supported by the radial reduction.
struct UnsupportedMode : Error {
  using Error::Error;
};

/// Quadrature failed to reach its target accuracy.
struct QuadratureError : Error {
  using Error::Error;
};

/// Grid does not support the requested differentiation order.
struct GridTooCoarse : Error {
  using Error::Error;
};

/// Requested fit curve spans less than the required range.
struct InsufficientRange : Error {
  using Error::Error;
};

/// Sample grid cannot resolve the bandwidth of the transformed function.
struct AliasError : Error {
  using Error::Error;
};

/// Iterative solver failed to converge.
struct NoConvergence : Error {
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem failure while emitting results.
struct IoError : Error {
  using Error::Error;
};

}  // namespace eblab
