#pragma once

// EW-TLS estimate: unconstrained minimization of Q(X) over n x d matrices
// (the rank constraint is enforced by rejecting line-search points where
// Z^T S_i Z cannot be factorized).

#include "ewtls/objective.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ewtls {

enum class InitKind { Ols, Tls, Given };

const char* to_string(InitKind kind);

struct SolverOptions {
  double grad_tol = 1e-9;   // on ||dQ/dX||_F / m
  double step_tol = 1e-12;  // relative parameter change
  int max_iter = 500;
  InitKind init = InitKind::Ols;
  std::optional<Matrix> given_init;  // required when init == Given
  int multistart = 0;
  std::uint64_t multistart_seed = 0x5eed;

  void validate() const;
};

struct EstimationResult {
  Matrix x_hat;
  double q_min = 0.0;
  double grad_norm = 0.0;
  double eq_residual_norm = 0.0;  // ||sum_i s_i(X_hat)||_F
  int iterations = 0;
  bool converged = false;
  InitKind init_used = InitKind::Ols;
  std::string message;
};

/// (A^T A)^{-1} A^T B via column-pivoted QR. Throws InitializationError when A
/// is rank deficient.
Matrix ols_estimate(const ProblemData& data);

/// Classical TLS from the SVD of C: X = -V12 V22^{-1}. Throws
/// NoTlsSolutionError when V22 is singular.
Matrix tls_estimate(const ProblemData& data);

/// BFGS on vec(X) with the expected Hessian 2 sum_i W_i^{-1} (x) a_i a_i^T as
/// the initial metric and Armijo backtracking. Non-convergence is reported
/// through `converged == false`; a line search that only ever meets
/// rank-violating points throws ConstraintError.
EstimationResult ewtls_solve(const ObjectiveContext& ctx, const SolverOptions& opts = {});

}  // namespace ewtls
