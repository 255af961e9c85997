#include "ewtls/validation.hpp"

#include "ewtls/errors.hpp"
#include "ewtls/inference.hpp"
#include "ewtls/objective.hpp"
#include "ewtls/simulation.hpp"
#include "ewtls/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace ewtls {

namespace {

using Clock = std::chrono::steady_clock;

Matrix random_matrix(Index r, Index c, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix m(r, c);
  for (Index k = 0; k < m.size(); ++k) m(k) = normal(rng);
  return m;
}

Matrix random_spd(Index k, std::mt19937_64& rng) {
  const Matrix b = random_matrix(k, k, rng);
  return b * b.transpose() / static_cast<double>(k) + 0.5 * Matrix::Identity(k, k);
}

// J always holds the output columns plus a random subset of the inputs.
IndexSet random_j(Index n, Index d, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.6);
  IndexSet j;
  for (Index k = 0; k < n; ++k)
    if (coin(rng)) j.push_back(k);
  for (Index k = n; k < n + d; ++k) j.push_back(k);
  return j;
}

CheckResult check_le(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

// Per-entry running mean and variance (Welford).
struct EntryStats {
  Matrix mean, m2;
  long count = 0;

  void add(const Matrix& x) {
    if (count == 0) {
      mean = Matrix::Zero(x.rows(), x.cols());
      m2 = Matrix::Zero(x.rows(), x.cols());
    }
    ++count;
    const Matrix delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(x - mean);
  }
  Matrix standard_error() const {
    return (m2 / static_cast<double>(count - 1) / static_cast<double>(count)).cwiseSqrt();
  }
};

double max_abs_z(const Matrix& diff, const Matrix& se) {
  double worst = 0.0;
  for (Index k = 0; k < diff.size(); ++k) {
    const double z = se(k) > 0.0 ? std::abs(diff(k)) / se(k) : (diff(k) == 0.0 ? 0.0 : INFINITY);
    worst = std::max(worst, z);
  }
  return worst;
}

// One row of a fixed Monte Carlo design: a0, S (all columns error-carrying),
// X0 and the factor of S.
struct RowDesign {
  Index n = 2, d = 2;
  Vector a0;
  FullCov s;
  Matrix x0;
  Matrix factor;
  double sigma2 = 0.25;
};

RowDesign row_design(std::mt19937_64& rng) {
  RowDesign des;
  des.a0 = random_matrix(des.n, 1, rng) + Vector::Ones(des.n);
  des.x0 = random_matrix(des.n, des.d, rng);
  IndexSet all;
  for (Index k = 0; k < des.n + des.d; ++k) all.push_back(k);
  des.s = embed_full_cov(random_spd(des.n + des.d, rng), all, des.n, des.d);
  des.factor = Eigen::LLT<Matrix>(des.sigma2 * des.s.s).matrixL();
  return des;
}

long mc_draws(const ValidationOptions& opts) { return opts.quick ? 10000 : 100000; }
double widen(const ValidationOptions& opts) { return opts.quick ? 2.0 : 1.0; }

}  // namespace

bool SuiteResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

bool ValidationReport::passed() const {
  for (const auto& s : suites)
    if (!s.passed()) return false;
  return !suites.empty();
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json doc;
  doc["passed"] = passed();
  doc["suites"] = nlohmann::json::array();
  for (const auto& s : suites) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) {
      checks.push_back({{"name", c.name},
                        {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                        {"threshold", c.threshold},
                        {"passed", c.passed}});
    }
    doc["suites"].push_back(
        {{"name", s.name}, {"passed", s.passed()}, {"seconds", s.seconds}, {"checks", std::move(checks)}});
  }
  return doc;
}

const std::vector<std::string>& validation_suite_names() {
  static const std::vector<std::string> names{"gradient", "oracle", "unbiased", "jacobian"};
  return names;
}

SuiteResult validate_gradient(const ValidationOptions& opts) {
  const auto t0 = Clock::now();
  SuiteResult res{"gradient", {}, 0.0};
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> nd(1, 4), dd(1, 3), md(5, 50);
  const double tol = 1e-6 * widen(opts);
  double worst = 0.0;
  const int instances = 50;
  for (int k = 0; k < instances; ++k) {
    const Index n = nd(rng), d = dd(rng), m = md(rng);
    const IndexSet j = random_j(n, d, rng);
    std::vector<Matrix> sig;
    for (Index i = 0; i < m; ++i) sig.push_back(random_spd(static_cast<Index>(j.size()), rng));
    const Dimensions dims{m, n, d};
    const ObjectiveContext ctx(ProblemData(random_matrix(m, n + d, rng), n),
                               ErrorStructure(j, std::move(sig), dims), opts.threads);
    const Matrix x = random_matrix(n, d, rng, 0.5);
    const Matrix g = objective_gradient(ctx, x);
    Matrix fd(n, d);
    for (Index e = 0; e < x.size(); ++e) {
      const double h = 1e-6 * (1.0 + std::abs(x(e)));
      Matrix xp = x, xm = x;
      xp(e) += h;
      xm(e) -= h;
      fd(e) = (objective_value(ctx, xp) - objective_value(ctx, xm)) / (2.0 * h);
    }
    worst = std::max(worst, (g - fd).norm() / std::max(fd.norm(), 1e-300));
  }
  res.checks.push_back(check_le("max relative error vs central differences (50 instances)", worst, tol));
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

SuiteResult validate_oracle(const ValidationOptions& opts) {
  const auto t0 = Clock::now();
  SuiteResult res{"oracle", {}, 0.0};
  std::mt19937_64 rng(opts.seed + 1);
  const double w = widen(opts);

  // Homoscedastic S_i = I on all columns: EW-TLS must coincide with SVD-TLS.
  double worst = 0.0;
  const Index m = 200, n = 3, d = 2;
  const int instances = opts.quick ? 5 : 20;
  IndexSet all{0, 1, 2, 3, 4};
  for (int k = 0; k < instances; ++k) {
    const TrueModel truth(random_matrix(m, n, rng), random_matrix(n, d, rng));
    const ProblemData data(truth.c0 + random_matrix(m, n + d, rng, 0.05), n);
    const ObjectiveContext ctx(data, ErrorStructure::common(all, Matrix::Identity(5, 5), {m, n, d}),
                               opts.threads);
    const EstimationResult est = ewtls_solve(ctx);
    const double diff = est.converged ? (est.x_hat - tls_estimate(data)).norm() : INFINITY;
    worst = std::max(worst, diff);
  }
  res.checks.push_back(check_le("max ||X_ewtls - X_tls||_F (homoscedastic)", worst, 1e-8 * w));

  // Zero noise with a heteroscedastic structure recovers X0 exactly.
  const ScenarioSpec spec = [] {
    ScenarioSpec s = default_scenario();
    s.dims.m = 200;
    s.sigma2 = 0.0;
    return s;
  }();
  const Dataset ds = generate_dataset(spec, 0);
  const ObjectiveContext ctx(ds.data, ds.errors, opts.threads);
  const EstimationResult est = ewtls_solve(ctx);
  res.checks.push_back(check_le("zero noise ||X_hat - X0||_F",
                                est.converged ? (est.x_hat - ds.truth.x0).norm() : INFINITY, 1e-8 * w));
  res.checks.push_back(check_le("zero noise sigma2_hat", estimate_sigma2(ctx, est.x_hat), 1e-12 * w));
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

SuiteResult validate_unbiased(const ValidationOptions& opts) {
  const auto t0 = Clock::now();
  SuiteResult res{"unbiased", {}, 0.0};
  std::mt19937_64 rng(opts.seed + 2);
  const RowDesign des = row_design(rng);
  const ParamZ z0(des.x0);
  const Vector c0 = [&] {
    Vector c(des.n + des.d);
    c << des.a0, des.x0.transpose() * des.a0;
    return c;
  }();
  std::normal_distribution<double> normal(0.0, 1.0);
  EntryStats stats;
  Vector xi(des.n + des.d);
  const long draws = mc_draws(opts);
  for (long k = 0; k < draws; ++k) {
    for (Index e = 0; e < xi.size(); ++e) xi(e) = normal(rng);
    const Vector c = c0 + des.factor * xi;
    stats.add(s_value(c.head(des.n), c.tail(des.d), des.s, z0));
  }
  res.checks.push_back(check_le("max |mean s(X0)| / SE over " + std::to_string(draws) + " draws",
                                max_abs_z(stats.mean, stats.standard_error()), 4.0 * widen(opts)));
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

SuiteResult validate_jacobian(const ValidationOptions& opts) {
  const auto t0 = Clock::now();
  SuiteResult res{"jacobian", {}, 0.0};
  std::mt19937_64 rng(opts.seed + 3);
  const RowDesign des = row_design(rng);
  const Matrix h = random_matrix(des.n, des.d, rng);
  const ParamZ z0(des.x0);
  constexpr double t = 1e-6;
  const ParamZ zp(des.x0 + t * h), zm(des.x0 - t * h);
  Vector c0(des.n + des.d);
  c0 << des.a0, des.x0.transpose() * des.a0;
  const Matrix expected = expected_jacobian_action(des.a0, des.s, z0, h);

  std::normal_distribution<double> normal(0.0, 1.0);
  EntryStats stats;
  Vector xi(des.n + des.d);
  const long draws = mc_draws(opts);
  for (long k = 0; k < draws; ++k) {
    for (Index e = 0; e < xi.size(); ++e) xi(e) = normal(rng);
    const Vector c = c0 + des.factor * xi;
    const Vector a = c.head(des.n), b = c.tail(des.d);
    stats.add((s_value(a, b, des.s, zp) - s_value(a, b, des.s, zm)) / (2.0 * t));
  }
  res.checks.push_back(check_le("max |mean FD(s'H) - a0 a0^T H W0^{-1}| / SE over " +
                                    std::to_string(draws) + " draws",
                                max_abs_z(stats.mean - expected, stats.standard_error()),
                                4.0 * widen(opts)));
  res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return res;
}

ValidationReport run_validation(const ValidationOptions& opts) {
  std::vector<std::string> suites = opts.suites;
  if (suites.empty() || (suites.size() == 1 && suites[0] == "all")) suites = validation_suite_names();
  ValidationReport report;
  for (const auto& name : suites) {
    if (name == "gradient") report.suites.push_back(validate_gradient(opts));
    else if (name == "oracle") report.suites.push_back(validate_oracle(opts));
    else if (name == "unbiased") report.suites.push_back(validate_unbiased(opts));
    else if (name == "jacobian") report.suites.push_back(validate_jacobian(opts));
    else throw InputError("unknown validation suite '" + name + "'");
  }
  return report;
}

}  // namespace ewtls
