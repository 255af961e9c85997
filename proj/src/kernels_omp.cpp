#include "ewtls/kernels.hpp"

#include "detail.hpp"
#include "reduce.hpp"

#include <optional>

namespace ewtls::kernels {

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

namespace {

// Quantities depending only on (S_i, Z): the factor of W = Z^T S Z and
// P = [S_a, S_ab] Z W^{-1}. With r = Z^T c and w = W^{-1} r one row gives
//   q = r^T w,  s~ = (a - P r) r^T,  s = (a - P r) w^T.
struct CovTerms {
  Eigen::LLT<Matrix> w;
  Matrix p;
};

CovTerms cov_terms(const FullCov& s, const Matrix& z, Index row) {
  const Index n = s.n;
  const Matrix sz = s.s * z;
  CovTerms t{detail::factor_spd(z.transpose() * sz, static_cast<std::size_t>(row)), {}};
  t.p = t.w.solve(sz.topRows(n).transpose()).transpose();
  return t;
}

// Shares the common-covariance factorization across rows.
class RowTerms {
 public:
  RowTerms(const ObjectiveContext& ctx, const Matrix& z) : ctx_(ctx), z_(z) {
    if (ctx.covs().size() == 1) shared_ = cov_terms(ctx.cov(0), z, 0);
  }

  const CovTerms& at(Index row) {
    if (shared_) return *shared_;
    local_ = cov_terms(ctx_.cov(row), z_, row);
    return local_;
  }

 private:
  const ObjectiveContext& ctx_;
  const Matrix& z_;
  std::optional<CovTerms> shared_;
  CovTerms local_;
};

struct Partial {
  double value = 0.0;
  Matrix grad;
};

}  // namespace

ObjectiveEval evaluate(const ObjectiveContext& ctx, const Matrix& x, bool with_gradient) {
  const Dimensions dims = ctx.dims();
  if (x.rows() != dims.n || x.cols() != dims.d) {
    throw InputError("X must be n x d");
  }
  const Matrix z = ParamZ(x).z();
  const Matrix& c = ctx.data().c();

  auto chunk = [&](Index begin, Index end) {
    RowTerms terms(ctx, z);
    Partial part;
    if (with_gradient) part.grad = Matrix::Zero(dims.n, dims.d);
    for (Index i = begin; i < end; ++i) {
      const CovTerms& t = terms.at(i);
      const Vector r = z.transpose() * c.row(i).transpose();
      const Vector w = t.w.solve(r);
      part.value += r.dot(w);
      if (with_gradient) {
        const Vector v = c.row(i).head(dims.n).transpose() - t.p * r;
        part.grad.noalias() += 2.0 * v * w.transpose();
      }
    }
    return part;
  };
  auto combine = [](Partial lhs, Partial rhs) {
    lhs.value += rhs.value;
    if (lhs.grad.size() > 0) lhs.grad += rhs.grad;
    return lhs;
  };
  Partial total = detail::chunked_reduce<Partial>(dims.m, ctx.threads(), chunk, combine);
  return {total.value, std::move(total.grad)};
}

Matrix sandwich_meat(const ObjectiveContext& ctx, const Matrix& x, const Vector& u) {
  const Dimensions dims = ctx.dims();
  if (u.size() != dims.d) throw InputError("direction u must have d entries");
  const Matrix z = ParamZ(x).z();
  const Matrix& c = ctx.data().c();
  auto chunk = [&](Index begin, Index end) {
    RowTerms terms(ctx, z);
    Matrix part = Matrix::Zero(dims.n, dims.n);
    for (Index i = begin; i < end; ++i) {
      const CovTerms& t = terms.at(i);
      const Vector r = z.transpose() * c.row(i).transpose();
      const double ru = r.dot(u);
      const Vector v = c.row(i).head(dims.n).transpose() - t.p * r;
      part.noalias() += (ru * ru) * v * v.transpose();
    }
    return part;
  };
  auto combine = [](Matrix lhs, Matrix rhs) {
    lhs += rhs;
    return lhs;
  };
  const Matrix total = detail::chunked_reduce<Matrix>(dims.m, ctx.threads(), chunk, combine);
  return total / static_cast<double>(dims.m);
}

Matrix expected_hessian(const ObjectiveContext& ctx, const Matrix& x) {
  const Dimensions dims = ctx.dims();
  const Index nd = dims.n * dims.d;
  const Matrix z = ParamZ(x).z();
  const Matrix& c = ctx.data().c();
  auto chunk = [&](Index begin, Index end) {
    RowTerms terms(ctx, z);
    Matrix part = Matrix::Zero(nd, nd);
    for (Index i = begin; i < end; ++i) {
      const Matrix winv = terms.at(i).w.solve(Matrix::Identity(dims.d, dims.d));
      const Vector a = c.row(i).head(dims.n).transpose();
      const Matrix aa = a * a.transpose();
      for (Index k = 0; k < dims.d; ++k)
        for (Index l = 0; l < dims.d; ++l)
          part.block(k * dims.n, l * dims.n, dims.n, dims.n) += (2.0 * winv(k, l)) * aa;
    }
    return part;
  };
  auto combine = [](Matrix lhs, Matrix rhs) {
    lhs += rhs;
    return lhs;
  };
  return detail::chunked_reduce<Matrix>(dims.m, ctx.threads(), chunk, combine);
}

}  // namespace ewtls::kernels
