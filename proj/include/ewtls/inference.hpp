#pragma once

// Nuisance parameters (sigma^2, V_A), the sandwich covariance of
// sqrt(m) (X_hat u - X0 u), and the resulting confidence ellipsoids.

#include "ewtls/objective.hpp"
#include "ewtls/solver.hpp"

namespace ewtls {

struct NuisanceEstimates {
  double sigma2_hat = 0.0;
  Matrix va_hat;   // n x n
  Matrix s_bar;    // m^{-1} sum S_i
  Matrix c_bar;    // m^{-1} sum c_i c_i^T
  bool va_positive_definite = false;
};

struct CovarianceEstimate {
  Vector u;
  Matrix su_hat;  // n x n, symmetric PSD
};

struct ConfidenceEllipsoid {
  Vector center;  // X_hat u
  Matrix shape;   // m * S_u^{-1}
  double level = 0.95;
  double radius2 = 0.0;

  /// (v - center)^T shape (v - center)
  double statistic(const Vector& v) const;
  bool contains(const Vector& v) const { return statistic(v) <= radius2; }
  /// Semi-axis lengths sqrt(radius2 / lambda_k(shape)), ascending eigenvalue order.
  Vector semi_axes() const;
};

Matrix average_cov(const ObjectiveContext& ctx);
Matrix average_outer(const ObjectiveContext& ctx);

/// (1/d) tr[(Z^T Cbar Z)(Z^T Sbar Z)^{-1}] at Z = [X_hat; -I], floored at 0.
double estimate_sigma2(const ObjectiveContext& ctx, const Matrix& x_hat);

/// m^{-1} sum a_i a_i^T - sigma2_hat * Sbar_a, symmetrized. May be indefinite
/// at small m; see NuisanceEstimates::va_positive_definite.
Matrix estimate_va(const ObjectiveContext& ctx, double sigma2_hat);

NuisanceEstimates estimate_nuisance(const ObjectiveContext& ctx, const Matrix& x_hat);

/// V_A^{-1} [m^{-1} sum s~_i u u^T s~_i^T] V_A^{-1}, symmetrized, with
/// eigenvalues in [-1e-10 * scale, 0) clipped to zero.
/// Throws InferenceError for u = 0, a singular V_A (condition >= 1e12), or a
/// clearly indefinite result.
CovarianceEstimate sandwich_su(const ObjectiveContext& ctx, const Matrix& x_hat,
                               const Matrix& va_hat, const Vector& u);

/// Ellipsoid {v : m (X_hat u - v)^T S_u^{-1} (X_hat u - v) <= chi2_{n}(level)}.
/// Throws InferenceError when S_u is not positive definite.
ConfidenceEllipsoid confidence_ellipsoid(const Matrix& x_hat, const CovarianceEstimate& cov,
                                         Index m, double level);

inline ConfidenceEllipsoid confidence_ellipsoid(const EstimationResult& est,
                                                const CovarianceEstimate& cov, Index m,
                                                double level) {
  return confidence_ellipsoid(est.x_hat, cov, m, level);
}

}  // namespace ewtls
