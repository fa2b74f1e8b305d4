#pragma once

#include <stdexcept>
#include <string>

namespace glws {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument shapes or values do not match (wrong dimension, non-finite input).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Covariance factorization failed even at the maximum jitter level.
class SingularCovarianceError : public Error {
 public:
  SingularCovarianceError(const std::string& msg, long row_a, long row_b)
      : Error(msg), row_a(row_a), row_b(row_b) {}
  long row_a = -1;  // indices of the closest pair of training rows
  long row_b = -1;
};

/// A requested allocation exceeds the configured memory budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A density estimate and a prediction cache belong to different surrogate
/// generations.
class StalenessError : public Error {
 public:
  using Error::Error;
};

/// Accumulated floating-point cancellation produced a variance below the
/// tolerated negative band; the caller should rebuild from scratch.
class NumericalDegradationError : public Error {
 public:
  using Error::Error;
};

/// The point is already interpolated by the posterior (predictive variance
/// at or below the duplicate floor).
class DuplicatePointError : public Error {
 public:
  using Error::Error;
};

/// Every candidate in the pool is masked by the duplicate floor.
class PoolExhaustedError : public Error {
 public:
  using Error::Error;
};

/// An ODE trajectory left the admissible state region.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace glws
