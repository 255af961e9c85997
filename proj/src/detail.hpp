#pragma once

#include "ewtls/errors.hpp"
#include "ewtls/model.hpp"

#include <algorithm>
#include <string>

namespace ewtls::detail {

// Smallest accepted Cholesky pivot^2 relative to the largest diagonal entry.
inline constexpr double kPivotTol = 1e-13;

/// Cholesky factor of Z^T S Z; a failed or near-zero pivot means the rank
/// constraint does not hold numerically.
inline Eigen::LLT<Matrix> factor_spd(const Matrix& w,
                                     std::size_t row = ConstraintError::kNoRow) {
  Eigen::LLT<Matrix> llt(w);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto diag = llt.matrixLLT().diagonal();
    const double wmax = std::max(w.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    ok = diag.allFinite() && diag.cwiseAbs2().minCoeff() > kPivotTol * wmax;
  }
  if (!ok) {
    std::string msg = "Z^T S Z is not positive definite";
    if (row != ConstraintError::kNoRow) msg += " at row " + std::to_string(row + 1);
    msg += " (rank(Z_J) = d violated)";
    throw ConstraintError(msg, row);
  }
  return llt;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace ewtls::detail
