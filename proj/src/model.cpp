#include "ewtls/model.hpp"

#include "ewtls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ewtls {

void validate_dimensions(const Dimensions& dims) {
  if (dims.m < 1 || dims.n < 1 || dims.d < 1) {
    throw InputError("dimensions must satisfy m >= 1, n >= 1, d >= 1 (got m=" +
                     std::to_string(dims.m) + ", n=" + std::to_string(dims.n) +
                     ", d=" + std::to_string(dims.d) + ")");
  }
}

ProblemData::ProblemData(Matrix c, Index n) : c_(std::move(c)), n_(n) {
  validate_dimensions({c_.rows(), n_, c_.cols() - n_});
  if (!c_.allFinite()) {
    for (Index i = 0; i < c_.rows(); ++i) {
      if (!c_.row(i).allFinite()) {
        throw InputError("data row " + std::to_string(i + 1) +
                         " contains a non-finite entry");
      }
    }
  }
}

ProblemData ProblemData::from_blocks(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw InputError("A and B must have the same number of rows");
  }
  Matrix c(a.rows(), a.cols() + b.cols());
  c << a, b;
  return ProblemData(std::move(c), a.cols());
}

Matrix symmetrize_checked(const Matrix& s, const char* what) {
  if (s.rows() != s.cols()) {
    throw InputError(std::string(what) + " must be square");
  }
  if (!s.allFinite()) {
    throw InputError(std::string(what) + " contains a non-finite entry");
  }
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw InputError(std::string(what) + " is not symmetric (max asymmetry " +
                     std::to_string(asym) + ")");
  }
  return 0.5 * (s + s.transpose());
}

namespace {

void validate_index_set(const IndexSet& j, Index p) {
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (j[k] < 0 || j[k] >= p) {
      throw InputError("column index " + std::to_string(j[k] + 1) +
                       " out of range 1.." + std::to_string(p));
    }
    if (k > 0 && j[k] <= j[k - 1]) {
      throw InputError("index set J must be strictly increasing");
    }
  }
}

}  // namespace

ErrorStructure::ErrorStructure(IndexSet j, std::vector<Matrix> sigma,
                               Dimensions dims, std::optional<double> sigma2)
    : j_(std::move(j)), dims_(dims), sigma2_(sigma2) {
  validate_dimensions(dims_);
  validate_index_set(j_, dims_.p());
  const auto jsize = static_cast<Index>(j_.size());
  if (jsize < dims_.d) {
    throw InputError("|J| = " + std::to_string(jsize) +
                     " is smaller than d = " + std::to_string(dims_.d) +
                     "; rank(Z_J) = d is impossible");
  }
  if (sigma.size() != 1 && sigma.size() != static_cast<std::size_t>(dims_.m)) {
    throw InputError("expected 1 or " + std::to_string(dims_.m) +
                     " Sigma matrices, got " + std::to_string(sigma.size()));
  }
  if (sigma2_ && !(*sigma2_ >= 0.0 && std::isfinite(*sigma2_))) {
    throw InputError("sigma2 must be a finite nonnegative scalar");
  }
  sigma_.reserve(sigma.size());
  kappa2_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const std::string label = "Sigma for row " + std::to_string(i + 1);
    if (sigma[i].rows() != jsize || sigma[i].cols() != jsize) {
      throw InputError(label + " must be " + std::to_string(jsize) + "x" +
                       std::to_string(jsize));
    }
    Matrix sym = symmetrize_checked(sigma[i], label.c_str());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    if (!(lmin > 0.0)) {
      throw InputError(label + " is not positive definite (lambda_min = " +
                       std::to_string(lmin) + ")");
    }
    kappa2_ = std::min(kappa2_, lmin);
    sigma_.push_back(std::move(sym));
  }
}

ErrorStructure ErrorStructure::common(IndexSet j, Matrix sigma, Dimensions dims,
                                      std::optional<double> sigma2) {
  std::vector<Matrix> one;
  one.push_back(std::move(sigma));
  return ErrorStructure(std::move(j), std::move(one), dims, sigma2);
}

ErrorStructure ErrorStructure::scaled(double tau) const {
  if (!(tau > 0.0)) throw InputError("scale factor must be positive");
  std::vector<Matrix> s;
  s.reserve(sigma_.size());
  for (const auto& m : sigma_) s.push_back(tau * m);
  return ErrorStructure(j_, std::move(s), dims_, sigma2_);
}

FullCov embed_full_cov(const Matrix& sigma, const IndexSet& j, Index n, Index d) {
  const Index p = n + d;
  validate_index_set(j, p);
  const auto jsize = static_cast<Index>(j.size());
  if (sigma.rows() != jsize || sigma.cols() != jsize) {
    throw InputError("Sigma must be |J| x |J|");
  }
  const Matrix sym = symmetrize_checked(sigma, "Sigma");
  FullCov out{Matrix::Zero(p, p), n};
  for (Index r = 0; r < jsize; ++r) {
    for (Index c = 0; c < jsize; ++c) {
      out.s(j[r], j[c]) = sym(r, c);
    }
  }
  return out;
}

Matrix restrict_rows(const Matrix& m, const IndexSet& j) {
  Matrix out(static_cast<Index>(j.size()), m.cols());
  for (std::size_t k = 0; k < j.size(); ++k) out.row(static_cast<Index>(k)) = m.row(j[k]);
  return out;
}

Matrix restrict(const Matrix& m, const IndexSet& j) {
  const auto k = static_cast<Index>(j.size());
  Matrix out(k, k);
  for (Index r = 0; r < k; ++r)
    for (Index c = 0; c < k; ++c) out(r, c) = m(j[r], j[c]);
  return out;
}

ParamZ::ParamZ(const Matrix& x) : x_(x), z_(x.rows() + x.cols(), x.cols()) {
  z_.topRows(x.rows()) = x;
  z_.bottomRows(x.cols()) = -Matrix::Identity(x.cols(), x.cols());
}

ParamZ::ParamZ(const Matrix& x, const IndexSet& j) : ParamZ(x) {
  validate_index_set(j, z_.rows());
  z_j_ = restrict_rows(z_, j);
}

bool check_rank_constraint(const ParamZ& z, const IndexSet& j, double tol) {
  const Index d = z.d();
  if (static_cast<Index>(j.size()) < d) return false;
  const Matrix zj = restrict_rows(z.z(), j);
  if (!zj.allFinite()) return false;
  Eigen::JacobiSVD<Matrix> svd(zj);
  const auto& sv = svd.singularValues();
  if (sv.size() < d) return false;
  return sv(d - 1) > tol * std::max(sv(0), 1.0);
}

TrueModel::TrueModel(Matrix a0_in, Matrix x0_in)
    : x0(std::move(x0_in)), a0(std::move(a0_in)) {
  if (a0.cols() != x0.rows()) {
    throw InputError("A0 column count must equal X0 row count");
  }
  b0 = a0 * x0;
  c0.resize(a0.rows(), a0.cols() + x0.cols());
  c0 << a0, b0;
}

}  // namespace ewtls
