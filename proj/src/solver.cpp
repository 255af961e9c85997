#include "ewtls/solver.hpp"

#include "ewtls/errors.hpp"
#include "ewtls/kernels.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ewtls {

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Ols: return "ols";
    case InitKind::Tls: return "tls";
    case InitKind::Given: return "given";
  }
  return "unknown";
}

void SolverOptions::validate() const {
  if (!(grad_tol > 0.0) || !(step_tol > 0.0)) {
    throw InputError("solver tolerances must be positive");
  }
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (multistart < 0) throw InputError("multistart must be nonnegative");
  if (init == InitKind::Given && !given_init) {
    throw InputError("init = given requires an initial X");
  }
}

Matrix ols_estimate(const ProblemData& data) {
  const Eigen::ColPivHouseholderQR<Matrix> qr(data.a());
  if (qr.rank() < data.dims().n) {
    throw InitializationError("A is rank deficient (rank " + std::to_string(qr.rank()) +
                              " < n); use --init tls or supply an initial X");
  }
  return qr.solve(Matrix(data.b()));
}

Matrix tls_estimate(const ProblemData& data) {
  const Dimensions dims = data.dims();
  const Eigen::JacobiSVD<Matrix> svd(data.c(), Eigen::ComputeFullV);
  const Matrix v = svd.matrixV().rightCols(dims.d);
  const Matrix v12 = v.topRows(dims.n);
  const Matrix v22 = v.bottomRows(dims.d);
  const Eigen::JacobiSVD<Matrix> v22_svd(v22);
  const double smin = v22_svd.singularValues()(dims.d - 1);
  if (!(smin > 1e-12)) {
    throw NoTlsSolutionError(
        "classical TLS has no solution: the output block of the smallest right "
        "singular subspace is singular");
  }
  // X = -V12 V22^{-1}
  return -(v22.transpose().fullPivLu().solve(v12.transpose())).transpose();
}

namespace {

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Inverse of the expected Hessian at x, or a scaled identity if that fails.
Matrix initial_inverse_hessian(const ObjectiveContext& ctx, const Matrix& x) {
  const Index nd = x.size();
  try {
    const Matrix h = kernels::expected_hessian(ctx, x);
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) {
      return llt.solve(Matrix::Identity(nd, nd));
    }
  } catch (const ConstraintError&) {
  }
  return Matrix::Identity(nd, nd) / static_cast<double>(ctx.dims().m);
}

EstimationResult solve_from(const ObjectiveContext& ctx, const Matrix& x_init,
                            InitKind kind, const SolverOptions& opts) {
  const Dimensions dims = ctx.dims();
  const double m = static_cast<double>(dims.m);
  const IndexSet& j = ctx.errors().j();
  if (!check_rank_constraint(ParamZ(x_init), j)) {
    throw ConstraintError("initial point violates rank(Z_J) = d");
  }

  EstimationResult res;
  res.init_used = kind;
  Matrix x = x_init;
  ObjectiveEval cur = kernels::evaluate(ctx, x, true);
  const Matrix h0 = initial_inverse_hessian(ctx, x);
  Matrix hinv = h0;

  constexpr double kArmijo = 1e-4;
  constexpr double kShrink = 0.5;
  constexpr double kRoundoff = 1e-13;

  int iter = 0;
  bool converged = false;
  std::string message = "maximum iterations reached";
  while (true) {
    const double gnorm = cur.gradient.norm();
    if (gnorm <= opts.grad_tol * m) {
      converged = true;
      message = "gradient tolerance met";
      break;
    }
    if (iter >= opts.max_iter) break;

    const Vector g = vec(cur.gradient);
    Vector p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv = h0;
      p = -hinv * g;
      slope = g.dot(p);
    }

    const double xscale = 1.0 + x.norm();
    double alpha = 1.0;
    bool accepted = false;
    bool any_feasible = false;
    Matrix x_new;
    ObjectiveEval next;
    while (alpha * p.norm() > opts.step_tol * xscale) {
      x_new = x + unvec(alpha * p, dims.n, dims.d);
      bool feasible = check_rank_constraint(ParamZ(x_new), j);
      if (feasible) {
        try {
          next = kernels::evaluate(ctx, x_new, true);
          feasible = std::isfinite(next.value);
        } catch (const ConstraintError&) {
          feasible = false;
        }
      }
      if (feasible) {
        any_feasible = true;
        const double fdiff = next.value - cur.value;
        if (fdiff <= kArmijo * alpha * slope) {
          accepted = true;
        } else if (fdiff <= kRoundoff * std::max(1.0, std::abs(cur.value)) &&
                   next.gradient.norm() < gnorm) {
          // Change in Q within round-off, gradient still shrinking.
          accepted = true;
        }
        if (accepted) break;
      }
      alpha *= kShrink;
    }
    if (!accepted) {
      if (!any_feasible) {
        throw ConstraintError(
            "line search met only points violating rank(Z_J) = d");
      }
      message = "line search failed to decrease Q";
      break;
    }

    const Vector s = vec(x_new - x);
    const Vector y = vec(next.gradient - cur.gradient);
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Index nd = s.size();
      const Matrix left = Matrix::Identity(nd, nd) - rho * s * y.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }
    x = std::move(x_new);
    cur = std::move(next);
    ++iter;
    if (s.norm() <= opts.step_tol * (1.0 + x.norm())) {
      converged = cur.gradient.norm() <= opts.grad_tol * m;
      message = converged ? "gradient tolerance met" : "step tolerance reached";
      break;
    }
  }

  res.x_hat = x;
  res.q_min = cur.value;
  res.grad_norm = cur.gradient.norm();
  res.eq_residual_norm = estimating_sum(ctx, x).norm();
  res.iterations = iter;
  res.converged = converged;
  res.message = message;
  return res;
}

bool better(const EstimationResult& a, const EstimationResult& b) {
  if (a.converged != b.converged) return a.converged;
  return a.q_min < b.q_min;
}

}  // namespace

EstimationResult ewtls_solve(const ObjectiveContext& ctx, const SolverOptions& opts) {
  opts.validate();
  Matrix x_init;
  InitKind kind = opts.init;
  switch (opts.init) {
    case InitKind::Given:
      x_init = *opts.given_init;
      if (x_init.rows() != ctx.dims().n || x_init.cols() != ctx.dims().d) {
        throw InputError("initial X must be n x d");
      }
      break;
    case InitKind::Tls:
      x_init = tls_estimate(ctx.data());
      break;
    case InitKind::Ols:
      try {
        x_init = ols_estimate(ctx.data());
      } catch (const InitializationError&) {
        x_init = tls_estimate(ctx.data());
        kind = InitKind::Tls;
      }
      break;
  }

  EstimationResult best = solve_from(ctx, x_init, kind, opts);
  if (opts.multistart > 0) {
    std::mt19937_64 rng(opts.multistart_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < opts.multistart; ++k) {
      Matrix x = x_init;
      for (Index e = 0; e < x.size(); ++e) {
        x(e) += 0.1 * (1.0 + std::abs(x_init(e))) * normal(rng);
      }
      try {
        EstimationResult cand = solve_from(ctx, x, kind, opts);
        if (better(cand, best)) best = std::move(cand);
      } catch (const ConstraintError&) {
        // infeasible perturbed start
      }
    }
  }
  return best;
}

}  // namespace ewtls
