#pragma once

// Loss q(c, S; X) = c^T Z (Z^T S Z)^{-1} Z^T c, its row sum Q(X), the
// estimating functions s~ and s, and the derivative actions used by the
// asymptotic analysis. Every (Z^T S Z)^{-1} is applied through a Cholesky
// solve; explicit inverses only appear in the test oracles.

#include "ewtls/model.hpp"

#include <vector>

namespace ewtls {

/// Rows of C paired with their cached full covariances S_i.
class ObjectiveContext {
 public:
  /// `threads` is forwarded to the parallel row kernels; 0 means the OpenMP
  /// default.
  ObjectiveContext(ProblemData data, ErrorStructure errors, int threads = 0);

  const ProblemData& data() const { return data_; }
  const ErrorStructure& errors() const { return errors_; }
  Dimensions dims() const { return data_.dims(); }
  int threads() const { return threads_; }

  const FullCov& cov(Index row) const {
    return covs_[covs_.size() == 1 ? 0 : static_cast<std::size_t>(row)];
  }
  /// One entry (shared) or m entries, mirroring ErrorStructure.
  const std::vector<FullCov>& covs() const { return covs_; }

  /// Same data and structure, different kernel thread count.
  ObjectiveContext with_threads(int threads) const;

 private:
  ProblemData data_;
  ErrorStructure errors_;
  std::vector<FullCov> covs_;
  int threads_;
};

// Per-row quantities. `c` = [a; b]. All throw ConstraintError when Z^T S Z is
// not numerically positive definite.

double q_value(const Vector& c, const FullCov& s, const ParamZ& z);

/// a c^T Z - [S_a, S_ab] Z (Z^T S Z)^{-1} Z^T c c^T Z
Matrix s_tilde(const Vector& a, const Vector& b, const FullCov& s, const ParamZ& z);

/// s~ (Z^T S Z)^{-1}
Matrix s_value(const Vector& a, const Vector& b, const FullCov& s, const ParamZ& z);

/// Derivative of f(Z) = Z (Z^T S Z)^{-1} along X -> X + tH:
/// [H;0] W^{-1} - Z W^{-1} ([H^T,0] S Z + Z^T S [H;0]) W^{-1}, W = Z^T S Z.
Matrix f_prime_action(const ParamZ& z, const FullCov& s, const Matrix& h);

/// Directional derivative of s~ in X along H.
Matrix s_tilde_jacobian_action(const Vector& a, const Vector& b, const FullCov& s,
                               const ParamZ& z, const Matrix& h);

/// Directional derivative of s in X along H.
Matrix s_jacobian_action(const Vector& a, const Vector& b, const FullCov& s,
                         const ParamZ& z, const Matrix& h);

/// E[s'_X(a, b, S; X0) H] = a0 a0^T H (Z0^T S Z0)^{-1}.
Matrix expected_jacobian_action(const Vector& a0, const FullCov& s,
                                const ParamZ& z0, const Matrix& h);

// Row sums. These use the parallel kernel with its fixed reduction tree.

/// Q(X) = sum_i q(c_i, S_i; X).
double objective_value(const ObjectiveContext& ctx, const Matrix& x);

/// dQ/dX = 2 sum_i s(a_i, b_i, S_i; X), identified through <A,B> = tr(A B^T).
Matrix objective_gradient(const ObjectiveContext& ctx, const Matrix& x);

/// sum_i s(a_i, b_i, S_i; X), the estimating-equation residual.
Matrix estimating_sum(const ObjectiveContext& ctx, const Matrix& x);

}  // namespace ewtls
