#pragma once

// Row-sum kernels over the m observations. The OpenMP kernels split the rows
// into fixed chunks of kChunkRows, sum each chunk in row order, then combine
// chunk partials with a pairwise tree whose shape depends only on m. Results
// are therefore bit-identical for any thread count. The serial kernels are the
// plain row-order reference built from the per-row operations in
// objective.hpp and are kept for testing and benchmarking.

#include "ewtls/objective.hpp"

namespace ewtls {

struct ObjectiveEval {
  double value = 0.0;
  Matrix gradient;  // empty unless requested
};

namespace kernels {

inline constexpr Index kChunkRows = 64;

/// Q(X) and optionally dQ/dX.
ObjectiveEval evaluate(const ObjectiveContext& ctx, const Matrix& x,
                       bool with_gradient);

/// m^{-1} sum_i s~_i u u^T s~_i^T (the sandwich meat), n x n.
Matrix sandwich_meat(const ObjectiveContext& ctx, const Matrix& x, const Vector& u);

/// 2 sum_i W_i^{-1} (x) a_i a_i^T on vec(X) (column-major): the expected
/// Hessian of Q, with a0 replaced by the observed a_i.
Matrix expected_hessian(const ObjectiveContext& ctx, const Matrix& x);

namespace serial {

ObjectiveEval evaluate(const ObjectiveContext& ctx, const Matrix& x,
                       bool with_gradient);

Matrix sandwich_meat(const ObjectiveContext& ctx, const Matrix& x, const Vector& u);

}  // namespace serial

/// Effective OpenMP thread count for a request (0 = runtime default).
int resolve_threads(int requested);

}  // namespace kernels
}  // namespace ewtls
