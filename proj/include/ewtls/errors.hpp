#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ewtls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (files, dimensions, index sets, covariances).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Z^T S Z could not be factorized, i.e. the rank constraint rank(Z_J) = d
/// is violated (or numerically so) at the evaluation point.
class ConstraintError : public Error {
 public:
  static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

  explicit ConstraintError(const std::string& what, std::size_t row = kNoRow)
      : Error(what), row_(row) {}

  /// 0-based row index of the offending observation, or kNoRow.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Starting-point computation failed (e.g. rank-deficient A for OLS).
class InitializationError : public Error {
 public:
  using Error::Error;
};

/// The classical TLS problem has no solution (V22 singular).
class NoTlsSolutionError : public Error {
 public:
  using Error::Error;
};

/// Nuisance / covariance estimation failed (singular V_A, indefinite S_u, ...).
class InferenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ewtls
