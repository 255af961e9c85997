#include "ewtls/inference.hpp"

#include "detail.hpp"
#include "ewtls/chi_square.hpp"
#include "ewtls/errors.hpp"
#include "ewtls/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ewtls {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kClipTol = 1e-10;

}  // namespace

double ConfidenceEllipsoid::statistic(const Vector& v) const {
  const Vector diff = v - center;
  return diff.dot(shape * diff);
}

Vector ConfidenceEllipsoid::semi_axes() const {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(shape, Eigen::EigenvaluesOnly);
  return (radius2 * eig.eigenvalues().cwiseInverse()).cwiseSqrt();
}

Matrix average_cov(const ObjectiveContext& ctx) {
  const auto& covs = ctx.covs();
  Matrix sum = Matrix::Zero(covs.front().s.rows(), covs.front().s.cols());
  for (const auto& s : covs) sum += s.s;
  return sum / static_cast<double>(covs.size());
}

Matrix average_outer(const ObjectiveContext& ctx) {
  const Matrix& c = ctx.data().c();
  return detail::symmetrize(c.transpose() * c) / static_cast<double>(c.rows());
}

double estimate_sigma2(const ObjectiveContext& ctx, const Matrix& x_hat) {
  const Matrix z = ParamZ(x_hat).z();
  const Matrix zcz = z.transpose() * average_outer(ctx) * z;
  Eigen::LLT<Matrix> w;
  try {
    w = detail::factor_spd(z.transpose() * average_cov(ctx) * z);
  } catch (const ConstraintError& e) {
    throw InferenceError(std::string("sigma^2 estimate: ") + e.what());
  }
  return std::max(0.0, w.solve(zcz).trace() / static_cast<double>(x_hat.cols()));
}

Matrix estimate_va(const ObjectiveContext& ctx, double sigma2_hat) {
  if (!(sigma2_hat >= 0.0)) throw InferenceError("sigma2_hat must be nonnegative");
  const Index n = ctx.dims().n;
  const auto a = ctx.data().a();
  const Matrix aa = a.transpose() * a / static_cast<double>(ctx.dims().m);
  const Matrix sbar_a = average_cov(ctx).topLeftCorner(n, n);
  return detail::symmetrize(aa - sigma2_hat * sbar_a);
}

NuisanceEstimates estimate_nuisance(const ObjectiveContext& ctx, const Matrix& x_hat) {
  NuisanceEstimates out;
  out.sigma2_hat = estimate_sigma2(ctx, x_hat);
  out.va_hat = estimate_va(ctx, out.sigma2_hat);
  out.s_bar = average_cov(ctx);
  out.c_bar = average_outer(ctx);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.va_hat, Eigen::EigenvaluesOnly);
  out.va_positive_definite = eig.eigenvalues()(0) > 0.0;
  return out;
}

CovarianceEstimate sandwich_su(const ObjectiveContext& ctx, const Matrix& x_hat,
                               const Matrix& va_hat, const Vector& u) {
  const Index n = ctx.dims().n;
  if (u.size() != ctx.dims().d || u.squaredNorm() == 0.0) {
    throw InferenceError("direction u must be a nonzero d-vector");
  }
  if (va_hat.rows() != n || va_hat.cols() != n) {
    throw InferenceError("V_A estimate must be n x n");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> va_eig(detail::symmetrize(va_hat));
  const Vector lam = va_eig.eigenvalues();
  const double amin = lam.cwiseAbs().minCoeff();
  const double amax = lam.cwiseAbs().maxCoeff();
  if (!(amin > 0.0) || amax / amin >= kMaxCondition) {
    throw InferenceError(
        "V_A estimate is singular (condition number >= 1e12); more rows are needed");
  }
  const Matrix va_inv =
      va_eig.eigenvectors() * lam.cwiseInverse().asDiagonal() * va_eig.eigenvectors().transpose();
  const Matrix meat = kernels::sandwich_meat(ctx, x_hat, u);
  const Matrix raw = detail::symmetrize(va_inv * meat * va_inv);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(raw);
  Vector ev = eig.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -kClipTol * scale) {
    throw InferenceError("sandwich covariance estimate is indefinite");
  }
  CovarianceEstimate out{u, raw};
  if (ev.minCoeff() < 0.0) {
    ev = ev.cwiseMax(0.0);
    out.su_hat = detail::symmetrize(eig.eigenvectors() * ev.asDiagonal() *
                                    eig.eigenvectors().transpose());
  }
  return out;
}

ConfidenceEllipsoid confidence_ellipsoid(const Matrix& x_hat, const CovarianceEstimate& cov,
                                         Index m, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InferenceError("level must lie in (0, 1)");
  if (m < 1) throw InferenceError("m must be positive");
  const Index n = x_hat.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov.su_hat);
  const Vector lam = eig.eigenvalues();
  if (!(lam(0) > 1e-14 * std::max(1.0, lam(n - 1)))) {
    throw InferenceError("S_u estimate is not positive definite; no ellipsoid");
  }
  ConfidenceEllipsoid out;
  out.center = x_hat * cov.u;
  out.shape = detail::symmetrize(static_cast<double>(m) * eig.eigenvectors() *
                                 lam.cwiseInverse().asDiagonal() *
                                 eig.eigenvectors().transpose());
  out.level = level;
  out.radius2 = chi_square_quantile(level, static_cast<double>(n));
  return out;
}

}  // namespace ewtls
