#include "ewtls/objective.hpp"

#include "detail.hpp"
#include "ewtls/errors.hpp"
#include "ewtls/kernels.hpp"

namespace ewtls {

namespace {

void check_row_shapes(const Vector& c, const FullCov& s, const ParamZ& z) {
  if (c.size() != z.z().rows() || s.s.rows() != c.size() || s.s.cols() != c.size() ||
      s.n != z.n()) {
    throw InputError("row vector, covariance and Z have inconsistent sizes");
  }
}

Vector stack(const Vector& a, const Vector& b) {
  Vector c(a.size() + b.size());
  c << a, b;
  return c;
}

// Right multiplication by W^{-1} for symmetric W.
Matrix right_solve(const Eigen::LLT<Matrix>& w, const Matrix& m) {
  return w.solve(m.transpose()).transpose();
}

Matrix pad_h(const Matrix& h, Index d) {
  Matrix hp = Matrix::Zero(h.rows() + d, h.cols());
  hp.topRows(h.rows()) = h;
  return hp;
}

}  // namespace

ObjectiveContext::ObjectiveContext(ProblemData data, ErrorStructure errors, int threads)
    : data_(std::move(data)), errors_(std::move(errors)), threads_(threads) {
  const Dimensions dd = data_.dims();
  const Dimensions de = errors_.dims();
  if (dd.m != de.m || dd.n != de.n || dd.d != de.d) {
    throw InputError("data dimensions (m=" + std::to_string(dd.m) + ", n=" +
                     std::to_string(dd.n) + ", d=" + std::to_string(dd.d) +
                     ") do not match the error structure");
  }
  covs_.reserve(errors_.distinct_count());
  for (const auto& sigma : errors_.sigmas()) {
    covs_.push_back(embed_full_cov(sigma, errors_.j(), dd.n, dd.d));
  }
}

ObjectiveContext ObjectiveContext::with_threads(int threads) const {
  ObjectiveContext copy = *this;
  copy.threads_ = threads;
  return copy;
}

double q_value(const Vector& c, const FullCov& s, const ParamZ& z) {
  check_row_shapes(c, s, z);
  const Matrix& zz = z.z();
  const auto w = detail::factor_spd(zz.transpose() * s.s * zz);
  const Vector r = zz.transpose() * c;
  return r.dot(w.solve(r));
}

Matrix s_tilde(const Vector& a, const Vector& b, const FullCov& s, const ParamZ& z) {
  const Vector c = stack(a, b);
  check_row_shapes(c, s, z);
  const Matrix& zz = z.z();
  const auto w = detail::factor_spd(zz.transpose() * s.s * zz);
  const Vector r = zz.transpose() * c;            // Z^T c
  const Matrix rrT = r * r.transpose();           // Z^T c c^T Z
  const Matrix sz_a = s.a_rows() * zz;            // [S_a, S_ab] Z
  return a * r.transpose() - sz_a * w.solve(rrT);
}

Matrix s_value(const Vector& a, const Vector& b, const FullCov& s, const ParamZ& z) {
  const Matrix st = s_tilde(a, b, s, z);
  const Matrix& zz = z.z();
  const auto w = detail::factor_spd(zz.transpose() * s.s * zz);
  return right_solve(w, st);
}

Matrix f_prime_action(const ParamZ& z, const FullCov& s, const Matrix& h) {
  const Matrix& zz = z.z();
  if (h.rows() != z.n() || h.cols() != z.d()) {
    throw InputError("direction H must be n x d");
  }
  const Matrix sz = s.s * zz;
  const auto w = detail::factor_spd(zz.transpose() * sz);
  const Matrix hp = pad_h(h, z.d());
  const Matrix dw = hp.transpose() * sz + sz.transpose() * hp;
  const Matrix winv_dw_winv = right_solve(w, w.solve(dw));
  return right_solve(w, hp) - zz * winv_dw_winv;
}

Matrix s_tilde_jacobian_action(const Vector& a, const Vector& b, const FullCov& s,
                               const ParamZ& z, const Matrix& h) {
  const Vector c = stack(a, b);
  check_row_shapes(c, s, z);
  const Matrix& zz = z.z();
  const auto w = detail::factor_spd(zz.transpose() * s.s * zz);
  const Vector r = zz.transpose() * c;
  const Matrix f = right_solve(w, zz);                 // Z W^{-1}
  const Matrix fprime = f_prime_action(z, s, h);
  const Vector hta = h.transpose() * a;                // [H^T, 0] c
  const Matrix mixed = hta * r.transpose() + r * hta.transpose();
  return a * (a.transpose() * h) - s.a_rows() * fprime * (r * r.transpose()) -
         s.a_rows() * f * mixed;
}

Matrix s_jacobian_action(const Vector& a, const Vector& b, const FullCov& s,
                         const ParamZ& z, const Matrix& h) {
  const Matrix& zz = z.z();
  const Matrix sz = s.s * zz;
  const auto w = detail::factor_spd(zz.transpose() * sz);
  const Matrix hp = pad_h(h, z.d());
  const Matrix dw = hp.transpose() * sz + sz.transpose() * hp;
  const Matrix st = s_tilde(a, b, s, z);
  const Matrix dst = s_tilde_jacobian_action(a, b, s, z, h);
  return right_solve(w, dst) - right_solve(w, right_solve(w, st) * dw);
}

Matrix expected_jacobian_action(const Vector& a0, const FullCov& s, const ParamZ& z0,
                                const Matrix& h) {
  const Matrix& zz = z0.z();
  if (h.rows() != z0.n() || h.cols() != z0.d() || a0.size() != z0.n()) {
    throw InputError("a0 must have n entries and H must be n x d");
  }
  const auto w = detail::factor_spd(zz.transpose() * s.s * zz);
  return right_solve(w, a0 * (a0.transpose() * h));
}

double objective_value(const ObjectiveContext& ctx, const Matrix& x) {
  return kernels::evaluate(ctx, x, false).value;
}

Matrix objective_gradient(const ObjectiveContext& ctx, const Matrix& x) {
  return kernels::evaluate(ctx, x, true).gradient;
}

Matrix estimating_sum(const ObjectiveContext& ctx, const Matrix& x) {
  // Row-by-row s_value route, independent of the fused gradient kernel.
  return 0.5 * kernels::serial::evaluate(ctx, x, true).gradient;
}

}  // namespace ewtls
