#pragma once

// Observation model C = [A, B] = C0 + C~, C0 Z0 = 0, with row-wise error
// covariances sigma^2 * Sigma_i supported on the column set J.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace ewtls {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error-carrying columns, 0-based, strictly increasing. File formats use
/// 1-based indices; conversion happens in the io layer.
using IndexSet = std::vector<Index>;

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-12;

struct Dimensions {
  Index m = 0;  // observation rows
  Index n = 0;  // input columns (A)
  Index d = 0;  // output columns (B)

  Index p() const { return n + d; }
  /// m <= n makes A0^T A0 singular; allowed, but callers should warn.
  bool underdetermined() const { return m <= n; }
};

/// Validates m, n, d >= 1. Throws InputError.
void validate_dimensions(const Dimensions& dims);

/// Observed matrix C = [A, B], m x (n + d), all entries finite.
class ProblemData {
 public:
  ProblemData(Matrix c, Index n);
  static ProblemData from_blocks(const Matrix& a, const Matrix& b);

  const Matrix& c() const { return c_; }
  auto a() const { return c_.leftCols(n_); }
  auto b() const { return c_.rightCols(c_.cols() - n_); }
  auto row(Index i) const { return c_.row(i).transpose(); }

  Dimensions dims() const { return {c_.rows(), n_, c_.cols() - n_}; }
  Index rows() const { return c_.rows(); }

 private:
  Matrix c_;
  Index n_;
};

/// Returns the symmetrized copy (S + S^T) / 2 when the relative asymmetry is
/// within kSymmetryTol, throws InputError otherwise. `what` names the matrix
/// in the error message.
Matrix symmetrize_checked(const Matrix& s, const char* what);

/// J, the weight matrices Sigma_i (|J| x |J|, SPD) and the optional scale
/// sigma^2. A single Sigma is shared by every row.
class ErrorStructure {
 public:
  /// `sigma` holds either one matrix (common to all rows) or exactly m.
  ErrorStructure(IndexSet j, std::vector<Matrix> sigma, Dimensions dims,
                 std::optional<double> sigma2 = std::nullopt);

  static ErrorStructure common(IndexSet j, Matrix sigma, Dimensions dims,
                               std::optional<double> sigma2 = std::nullopt);

  const IndexSet& j() const { return j_; }
  const Dimensions& dims() const { return dims_; }
  const Matrix& sigma(Index row) const {
    return sigma_[is_common() ? 0 : static_cast<std::size_t>(row)];
  }
  bool is_common() const { return sigma_.size() == 1; }
  /// Number of stored Sigma matrices (1 or m).
  std::size_t distinct_count() const { return sigma_.size(); }
  const std::vector<Matrix>& sigmas() const { return sigma_; }

  std::optional<double> sigma2() const { return sigma2_; }
  /// min_i lambda_min(Sigma_i), strictly positive.
  double kappa2() const { return kappa2_; }

  /// Same structure with every Sigma_i replaced by tau * Sigma_i.
  ErrorStructure scaled(double tau) const;

 private:
  IndexSet j_;
  std::vector<Matrix> sigma_;
  Dimensions dims_;
  std::optional<double> sigma2_;
  double kappa2_ = 0.0;
};

/// Full (n+d) x (n+d) covariance S_i with Sigma_i scattered into rows and
/// columns J and zeros elsewhere.
struct FullCov {
  Matrix s;
  Index n = 0;

  auto a() const { return s.topLeftCorner(n, n); }
  auto ab() const { return s.topRightCorner(n, s.cols() - n); }
  auto ba() const { return s.bottomLeftCorner(s.rows() - n, n); }
  auto b() const { return s.bottomRightCorner(s.rows() - n, s.cols() - n); }
  /// [S_a, S_ab]
  auto a_rows() const { return s.topRows(n); }
};

FullCov embed_full_cov(const Matrix& sigma, const IndexSet& j, Index n, Index d);

/// Rows of `m` selected by `j`.
Matrix restrict_rows(const Matrix& m, const IndexSet& j);
/// Principal submatrix of `m` on `j`.
Matrix restrict(const Matrix& m, const IndexSet& j);

/// Z = [X; -I_d] and, when J is supplied, its row-submatrix Z_J.
class ParamZ {
 public:
  explicit ParamZ(const Matrix& x);
  ParamZ(const Matrix& x, const IndexSet& j);

  const Matrix& x() const { return x_; }
  const Matrix& z() const { return z_; }
  /// Empty when constructed without J.
  const Matrix& z_j() const { return z_j_; }
  Index n() const { return x_.rows(); }
  Index d() const { return x_.cols(); }

 private:
  Matrix x_;
  Matrix z_;
  Matrix z_j_;
};

inline ParamZ make_z(const Matrix& x) { return ParamZ(x); }
inline ParamZ make_z(const Matrix& x, const IndexSet& j) { return ParamZ(x, j); }

/// rank(Z_J) = d: the d-th largest singular value of Z_J exceeds
/// tol * max(sigma_1, 1). False when |J| < d.
bool check_rank_constraint(const ParamZ& z, const IndexSet& j,
                           double tol = kDefaultRankTol);

/// Ground truth for simulated data: B0 = A0 X0, C0 = [A0, B0].
struct TrueModel {
  TrueModel(Matrix a0_in, Matrix x0_in);

  Matrix x0;
  Matrix a0;
  Matrix b0;
  Matrix c0;
};

}  // namespace ewtls
