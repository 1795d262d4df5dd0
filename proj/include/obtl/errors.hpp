#pragma once

#include <stdexcept>
#include <string>

namespace obtl {

/// Base class for numerical failures (series, saddle points, factorizations).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameter outside the mathematical domain of an operation.
struct DomainError : NumericError {
  using NumericError::NumericError;
};

/// Series argument violates a convergence condition.
struct ConvergenceError : NumericError {
  using NumericError::NumericError;
};

/// Laplace saddle point does not exist or falls outside the admissible region.
struct SaddleError : NumericError {
  using NumericError::NumericError;
};

/// Laplace curvature term R_{2,1} is non-positive.
struct CurvatureError : NumericError {
  using NumericError::NumericError;
};

/// A matrix expected to be symmetric positive definite failed to factor.
struct FactorizationError : NumericError {
  using NumericError::NumericError;
};

/// Invalid run configuration (CLI / config file level).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or malformed input data (CSV ingestion, label ranges).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace obtl
