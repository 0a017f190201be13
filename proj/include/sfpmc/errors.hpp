#pragma once

#include <stdexcept>
#include <string>

namespace sfpmc {

/// Input violates a structural requirement (invalid body, inconsistent data).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation evaluated outside its domain of definition, e.g. projecting 0.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A numeric parameter is outside its admissible range.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Field shapes or grids do not match.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Boundary values of a field disagree with the Dirichlet datum.
struct ConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parallel-surface evaluation at or beyond a focal point.
struct FocalPointError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Fixed-point iteration hit its sweep cap.
struct IterationError : std::runtime_error {
  IterationError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual(last_residual) {}
  double last_residual;
};

/// Newton / line search stagnation.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

}  // namespace sfpmc
