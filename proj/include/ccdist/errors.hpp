#pragma once

#include <stdexcept>
#include <string>

namespace ccdist {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: dimension mismatches, invalid group data, out-of-domain arguments.
// The CLI maps these to exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

// Failures of an otherwise well-posed computation: non-convergence, pole hits,
// quadrature breakdown. The CLI maps these to exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct NotSkewSymmetric : ValidationError {
  explicit NotSkewSymmetric(int generator_index)
      : ValidationError("generator " + std::to_string(generator_index) +
                        " is not skew-symmetric"),
        index(generator_index) {}
  int index;
};

struct LinearlyDependentFamily : ValidationError {
  using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

struct OutOfRegion : ValidationError {
  using ValidationError::ValidationError;
};

struct OddInput : ValidationError {
  using ValidationError::ValidationError;
};

struct BadTheta : ValidationError {
  using ValidationError::ValidationError;
};

struct NotACriticalPoint : ValidationError {
  NotACriticalPoint(double gradient_norm, double tolerance)
      : ValidationError("gradient norm " + std::to_string(gradient_norm) +
                        " exceeds critical-point tolerance " +
                        std::to_string(tolerance)),
        gradient_norm(gradient_norm),
        tolerance(tolerance) {}
  double gradient_norm;
  double tolerance;
};

struct PoleError : NumericalError {
  explicit PoleError(double s)
      : NumericalError("scalar kernel evaluated at pole s = " + std::to_string(s)),
        s(s) {}
  double s;
};

struct PoleAtEigenvalue : NumericalError {
  explicit PoleAtEigenvalue(double eigenvalue)
      : NumericalError("matrix function has a pole at eigenvalue " +
                       std::to_string(eigenvalue)),
        eigenvalue(eigenvalue) {}
  double eigenvalue;
};

struct NonConvergence : NumericalError {
  NonConvergence(int iterations, double residual)
      : NumericalError("iteration failed to converge after " +
                       std::to_string(iterations) +
                       " steps (residual " + std::to_string(residual) + ")"),
        iterations(iterations),
        residual(residual) {}
  int iterations;
  double residual;
};

struct NewtonFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct QuadratureFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct BranchTrackingFailure : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace ccdist
