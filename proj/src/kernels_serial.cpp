#include "ewtls/errors.hpp"
#include "ewtls/kernels.hpp"

namespace ewtls::kernels::serial {

ObjectiveEval evaluate(const ObjectiveContext& ctx, const Matrix& x, bool with_gradient) {
  const Dimensions dims = ctx.dims();
  if (x.rows() != dims.n || x.cols() != dims.d) {
    throw InputError("X must be n x d");
  }
  const ParamZ z(x);
  const Matrix& c = ctx.data().c();
  ObjectiveEval out;
  if (with_gradient) out.gradient = Matrix::Zero(dims.n, dims.d);
  for (Index i = 0; i < dims.m; ++i) {
    const Vector ci = c.row(i).transpose();
    try {
      out.value += q_value(ci, ctx.cov(i), z);
      if (with_gradient) {
        out.gradient += 2.0 * s_value(ci.head(dims.n), ci.tail(dims.d), ctx.cov(i), z);
      }
    } catch (const ConstraintError& e) {
      throw ConstraintError(std::string(e.what()) + " at row " + std::to_string(i + 1),
                            static_cast<std::size_t>(i));
    }
  }
  return out;
}

Matrix sandwich_meat(const ObjectiveContext& ctx, const Matrix& x, const Vector& u) {
  const Dimensions dims = ctx.dims();
  if (u.size() != dims.d) throw InputError("direction u must have d entries");
  const ParamZ z(x);
  const Matrix& c = ctx.data().c();
  Matrix meat = Matrix::Zero(dims.n, dims.n);
  for (Index i = 0; i < dims.m; ++i) {
    const Vector ci = c.row(i).transpose();
    const Vector su = s_tilde(ci.head(dims.n), ci.tail(dims.d), ctx.cov(i), z) * u;
    meat += su * su.transpose();
  }
  return meat / static_cast<double>(dims.m);
}

}  // namespace ewtls::kernels::serial
