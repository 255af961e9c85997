#include "ewtls/errors.hpp"
#include "ewtls/solver.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace ewtls;

namespace {

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

struct Instance {
  TrueModel truth;
  ProblemData data;
  ErrorStructure errors;
};

// Heteroscedastic noisy instance with per-row Sigma on all columns.
Instance noisy_instance(std::mt19937_64& rng, Index m, Index n, Index d, double sd) {
  TrueModel tm(oracle::randn(m, n, rng) + Matrix::Ones(m, n), oracle::randn(n, d, rng));
  std::vector<Matrix> sig;
  Matrix c = tm.c0;
  for (Index i = 0; i < m; ++i) {
    sig.push_back(oracle::random_spd(n + d, rng));
    const Matrix l = Eigen::LLT<Matrix>(sig.back()).matrixL();
    c.row(i) += sd * (l * oracle::randn(n + d, 1, rng)).transpose();
  }
  return {tm, ProblemData(c, n), ErrorStructure(oracle::all_columns(n + d), sig, {m, n, d})};
}

}  // namespace

TEST(Ols, ExactModelAndZeroB) {
  std::mt19937_64 rng(30);
  const TrueModel tm(oracle::randn(20, 3, rng), oracle::randn(3, 2, rng));
  EXPECT_LE((ols_estimate(ProblemData(tm.c0, 3)) - tm.x0).norm(), 1e-10);
  Matrix c = tm.c0;
  c.rightCols(2).setZero();
  EXPECT_LE(ols_estimate(ProblemData(c, 3)).norm(), 1e-14);
}

TEST(Ols, NormalEquationsResidual) {
  std::mt19937_64 rng(31);
  const ProblemData data(oracle::randn(50, 5, rng), 3);
  const Matrix x = ols_estimate(data);
  const Matrix a = data.a(), b = data.b();
  const Matrix lhs = a.transpose() * b;
  EXPECT_LE((lhs - a.transpose() * a * x).norm(), 1e-10 * lhs.norm());
}

TEST(Ols, RankDeficientThrows) {
  Matrix c = Matrix::Ones(10, 3);
  EXPECT_THROW(ols_estimate(ProblemData(c, 2)), InitializationError);
}

TEST(Tls, ExactModel) {
  std::mt19937_64 rng(32);
  const TrueModel tm(oracle::randn(20, 3, rng), oracle::randn(3, 2, rng));
  EXPECT_LE((tls_estimate(ProblemData(tm.c0, 3)) - tm.x0).norm(), 1e-10);
}

TEST(Tls, NoSolutionHandExample) {
  Matrix c(2, 2);
  c << 1, 0, 0, 2;
  EXPECT_THROW(tls_estimate(ProblemData(c, 1)), NoTlsSolutionError);
}

TEST(Tls, CorrectionNormEqualsTrailingSingularValues) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 20; ++t) {
    const Index n = 3, d = 2;
    const ProblemData data(oracle::randn(40, n + d, rng), n);
    const Matrix x = tls_estimate(data);
    const Matrix z = oracle::z_of(x);
    // Smallest correction with Chat Z = 0 is C Z (Z^T Z)^{-1} Z^T.
    const Matrix delta = data.c() * z * (z.transpose() * z).inverse() * z.transpose();
    const Vector sv = oracle::singular_values_via_gram(data.c());
    const double expect = sv.tail(d).squaredNorm();
    EXPECT_NEAR(delta.squaredNorm(), expect, 1e-9 * expect);
  }
}

TEST(EwtlsSolve, ZeroNoiseRecoversTruth) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 5; ++t) {
    const TrueModel tm(oracle::randn(50, 2, rng) + Matrix::Ones(50, 2), oracle::randn(2, 2, rng));
    std::vector<Matrix> sig;
    for (int i = 0; i < 50; ++i) sig.push_back(oracle::random_spd(3, rng));
    const ObjectiveContext ctx(ProblemData(tm.c0, 2), ErrorStructure({1, 2, 3}, sig, {50, 2, 2}));
    const EstimationResult r = ewtls_solve(ctx);
    EXPECT_TRUE(r.converged);
    EXPECT_LE((r.x_hat - tm.x0).norm(), 1e-8);
  }
}

TEST(EwtlsSolve, HomoscedasticMatchesTls) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 5; ++t) {
    const TrueModel tm(oracle::randn(200, 3, rng), oracle::randn(3, 2, rng));
    const ProblemData data(tm.c0 + oracle::randn(200, 5, rng, 0.05), 3);
    const ObjectiveContext ctx(data, ErrorStructure::common(oracle::all_columns(5), Matrix::Identity(5, 5), {200, 3, 2}));
    const EstimationResult r = ewtls_solve(ctx);
    ASSERT_TRUE(r.converged);
    EXPECT_LE((r.x_hat - tls_estimate(data)).norm(), 1e-8);
  }
}

TEST(EwtlsSolve, ScalarCaseMatchesGoldenSection) {
  std::mt19937_64 rng(36);
  for (int t = 0; t < 5; ++t) {
    Instance inst = noisy_instance(rng, 5, 1, 1, 0.2);
    const ObjectiveContext ctx(inst.data, inst.errors);
    auto q = [&](double v) { return objective_value(ctx, Matrix::Constant(1, 1, v)); };
    const double coarse = oracle::grid_argmin(q, -10.0, 10.0, 20000);
    const double gs = oracle::golden_section(q, coarse - 1e-3, coarse + 1e-3, 1e-10);
    const EstimationResult r = ewtls_solve(ctx);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.x_hat(0, 0), gs, 1e-6);
    EXPECT_LE(r.q_min, q(gs) * (1.0 + 1e-12));
  }
}

TEST(EwtlsSolve, ResultContract) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 10; ++t) {
    Instance inst = noisy_instance(rng, 100, 2, 2, 0.1);
    const ObjectiveContext ctx(inst.data, inst.errors);
    SolverOptions opts;
    const EstimationResult r = ewtls_solve(ctx, opts);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.grad_norm, opts.grad_tol * 100);
    EXPECT_TRUE(check_rank_constraint(ParamZ(r.x_hat), inst.errors.j()));
    EXPECT_LE(r.q_min, objective_value(ctx, ols_estimate(inst.data)));
    EXPECT_NEAR(r.eq_residual_norm, 0.5 * r.grad_norm, 1e-10 * std::max(1.0, r.grad_norm));
    EXPECT_EQ(r.init_used, InitKind::Ols);
  }
}

TEST(EwtlsSolve, RowPermutationEquivariance) {
  std::mt19937_64 rng(38);
  Instance inst = noisy_instance(rng, 80, 2, 1, 0.1);
  const Index m = 80;
  std::vector<Index> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix cp(m, 3);
  std::vector<Matrix> sp;
  for (Index i = 0; i < m; ++i) {
    cp.row(i) = inst.data.c().row(perm[i]);
    sp.push_back(inst.errors.sigma(perm[i]));
  }
  const EstimationResult r1 = ewtls_solve(ObjectiveContext(inst.data, inst.errors));
  const EstimationResult r2 =
      ewtls_solve(ObjectiveContext(ProblemData(cp, 2), ErrorStructure(inst.errors.j(), sp, {m, 2, 1})));
  EXPECT_LE((r1.x_hat - r2.x_hat).norm(), 1e-10);
}

TEST(EwtlsSolve, ScaleEquivariance) {
  std::mt19937_64 rng(39);
  for (double tau : {1e-3, 0.5, 7.0, 1e3}) {
    Instance inst = noisy_instance(rng, 60, 2, 2, 0.1);
    const ObjectiveContext c1(inst.data, inst.errors);
    const ObjectiveContext c2(inst.data, inst.errors.scaled(tau));
    const Matrix x = oracle::randn(2, 2, rng);
    EXPECT_NEAR(objective_value(c2, x), objective_value(c1, x) / tau, 1e-12 * objective_value(c1, x) / tau);
    SolverOptions opts;
    opts.grad_tol = 1e-9 / std::max(1.0, tau);
    EXPECT_LE((ewtls_solve(c1).x_hat - ewtls_solve(c2, opts).x_hat).norm(), 1e-8);
  }
}

TEST(EwtlsSolve, InitialisationsAndMultistart) {
  std::mt19937_64 rng(40);
  Instance inst = noisy_instance(rng, 100, 3, 1, 0.1);
  const ObjectiveContext ctx(inst.data, inst.errors);
  SolverOptions tls;
  tls.init = InitKind::Tls;
  const EstimationResult rt = ewtls_solve(ctx, tls);
  EXPECT_EQ(rt.init_used, InitKind::Tls);
  SolverOptions given;
  given.init = InitKind::Given;
  given.given_init = inst.truth.x0;
  const EstimationResult rg = ewtls_solve(ctx, given);
  EXPECT_EQ(rg.init_used, InitKind::Given);
  const EstimationResult ro = ewtls_solve(ctx);
  EXPECT_LE((rt.x_hat - ro.x_hat).norm(), 1e-8);
  EXPECT_LE((rg.x_hat - ro.x_hat).norm(), 1e-8);

  SolverOptions ms;
  ms.multistart = 4;
  const EstimationResult rm = ewtls_solve(ctx, ms);
  EXPECT_TRUE(rm.converged);
  EXPECT_LE(rm.q_min, ro.q_min * (1.0 + 1e-12));
}

TEST(EwtlsSolve, OptionValidation) {
  SolverOptions o;
  o.init = InitKind::Given;
  EXPECT_THROW(o.validate(), InputError);
  SolverOptions t;
  t.grad_tol = 0.0;
  EXPECT_THROW(t.validate(), InputError);
  SolverOptions it;
  it.max_iter = 0;
  EXPECT_THROW(it.validate(), InputError);
  EXPECT_STREQ(to_string(InitKind::Tls), "tls");
}

TEST(EwtlsSolve, NonConvergenceReported) {
  std::mt19937_64 rng(41);
  Instance inst = noisy_instance(rng, 100, 2, 2, 0.3);
  SolverOptions o;
  o.max_iter = 1;
  o.grad_tol = 1e-14;
  const EstimationResult r = ewtls_solve(ObjectiveContext(inst.data, inst.errors), o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.iterations, 1);
}

TEST(EwtlsSolve, InfeasibleStartIsConstraintError) {
  // J = {1}, d = 1: Z_J = X, so X = 0 violates the rank constraint.
  std::mt19937_64 rng(42);
  const ObjectiveContext ctx(ProblemData(oracle::randn(10, 2, rng), 1),
                             ErrorStructure::common({0}, Matrix::Identity(1, 1), {10, 1, 1}));
  SolverOptions o;
  o.init = InitKind::Given;
  o.given_init = Matrix::Zero(1, 1);
  EXPECT_THROW(ewtls_solve(ctx, o), ConstraintError);
}
