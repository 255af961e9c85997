// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: ewtls_acceptance [criterion ...]   (default: all ten)

#include "ewtls/inference.hpp"
#include "ewtls/simulation.hpp"
#include "ewtls/solver.hpp"
#include "ewtls/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>

using namespace ewtls;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

void add(Outcome& o, bool ok, const std::string& text) {
  o.passed = o.passed && ok;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += text + (ok ? "" : " [x]");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome from_suite(const SuiteResult& s, const std::string& filter = "") {
  Outcome o;
  for (const auto& c : s.checks) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    add(o, c.passed, c.name + " = " + fmt("%.3g", c.value) + " (<= " + fmt("%.3g", c.threshold) + ")");
  }
  if (o.detail.empty()) add(o, false, "no checks ran");
  return o;
}

ValidationOptions vopts() {
  ValidationOptions o;
  o.quick = false;
  return o;
}

Outcome exact_recovery() {
  Outcome o;
  for (bool per_row : {false, true}) {
    ScenarioSpec spec = default_scenario();
    spec.dims.m = per_row ? 300 : 2000;
    spec.sigma2 = 0.0;
    if (per_row) {
      spec.profile.kind = SigmaProfile::Kind::PerRow;
      for (Index i = 0; i < spec.dims.m; ++i) {
        Matrix s = Matrix::Identity(3, 3) * (1.0 + 0.01 * static_cast<double>(i % 17));
        s(0, 1) = s(1, 0) = 0.3;
        spec.profile.per_row.push_back(s);
      }
    }
    const Dataset ds = generate_dataset(spec, 0);
    const ObjectiveContext ctx(ds.data, ds.errors);
    const EstimationResult est = ewtls_solve(ctx);
    const double err = (est.x_hat - ds.truth.x0).norm();
    const double s2 = estimate_sigma2(ctx, est.x_hat);
    const std::string tag = per_row ? "per-row Sigma" : "default";
    add(o, est.converged && err <= 1e-8, tag + " ||X_hat - X0||_F = " + fmt("%.2e", err));
    add(o, s2 <= 1e-12, tag + " sigma2_hat = " + fmt("%.2e", s2));
  }
  return o;
}

Outcome consistency_rate(int threads) {
  Outcome o;
  McOptions mc;
  mc.threads = threads;
  double prev = 0.0;
  for (Index m : {100, 400, 1600}) {
    ScenarioSpec spec = default_scenario();
    spec.dims.m = m;
    const McSummary s = run_monte_carlo(spec, 200, mc).summary;
    add(o, s.valid, "m=" + std::to_string(m) + " median=" + fmt("%.4g", s.median_error));
    if (prev > 0.0) {
      const double ratio = prev / s.median_error;
      add(o, ratio >= 1.6 && ratio <= 2.6, "ratio " + fmt("%.3f", ratio) + " in [1.6, 2.6]");
    }
    prev = s.median_error;
  }
  return o;
}

Outcome nuisance_consistency(int threads) {
  Outcome o;
  ScenarioSpec spec = default_scenario();
  spec.dims.m = 5000;
  McOptions mc;
  mc.threads = threads;
  const McSummary s = run_monte_carlo(spec, 100, mc).summary;
  const double e_s2 = std::abs(s.mean_sigma2 - s.sigma2_true) / s.sigma2_true;
  const double e_va = (s.mean_va - s.va_reference).norm() / s.va_reference.norm();
  add(o, s.valid, "converged " + std::to_string(s.converged) + "/100");
  add(o, e_s2 <= 0.05, "sigma2 rel err " + fmt("%.4f", e_s2) + " <= 0.05");
  add(o, e_va <= 0.05, "VA rel err " + fmt("%.4f", e_va) + " <= 0.05");
  return o;
}

// Criteria 8 and 9 share one Monte Carlo run.
const McSummary& coverage_run(int threads) {
  static McSummary cached;
  static bool done = false;
  if (!done) {
    McOptions mc;
    mc.threads = threads;
    cached = run_monte_carlo(default_scenario(), 2000, mc).summary;
    done = true;
  }
  return cached;
}

Outcome sandwich_coverage(int threads) {
  Outcome o;
  const McSummary& s = coverage_run(threads);
  add(o, s.valid, "converged " + std::to_string(s.converged) + "/2000");
  add(o, s.su_relative_diff <= 0.10, "cov vs mean S_u rel diff " + fmt("%.4f", s.su_relative_diff) + " <= 0.10");
  const double cov = s.coverage.value_or(-1.0);
  add(o, cov >= 0.93 && cov <= 0.97, "coverage " + fmt("%.4f", cov) + " in [0.93, 0.97]");
  for (std::size_t k = 0; k < 3; ++k) {
    const double r = std::abs(s.statistic_quantiles[k] - s.chi2_quantiles[k]) / s.chi2_quantiles[k];
    add(o, r <= 0.10,
        "q" + fmt("%.2f", kStatisticQuantileLevels[k]) + " " + fmt("%.4f", s.statistic_quantiles[k]) + " vs " +
            fmt("%.4f", s.chi2_quantiles[k]) + " (rel " + fmt("%.3f", r) + ")");
  }
  return o;
}

Outcome nonsingular_limit(int threads) {
  Outcome o;
  const McSummary& s = coverage_run(threads);
  add(o, s.empirical_cov_eig_ratio > 0.1, "criterion 8 run, lambda_min/lambda_max " + fmt("%.4f", s.empirical_cov_eig_ratio) + " > 0.1");
  return o;
}

Outcome clt(int threads) {
  Outcome o;
  const CltReport r = clt_diagnostics(default_scenario(), 2000, threads);
  add(o, !r.zero_components, "nonzero components");
  add(o, r.independence_ok, "max |cross-cov z| " + fmt("%.3f", r.max_abs_cross_z) + " <= 4");
  add(o, r.skewness_ok, "max |skewness z| " + fmt("%.3f", r.max_abs_skewness_z) + " <= 4");
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome(int)> run;
};

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  if (const char* env = std::getenv("EWTLS_THREADS")) threads = std::atoi(env);

  const std::vector<Criterion> criteria{
      {1, "gradient vs central differences", 10.0, [](int) { return from_suite(validate_gradient(vopts())); }},
      {2, "homoscedastic TLS oracle", 30.0,
       [](int) { return from_suite(validate_oracle(vopts()), "homoscedastic"); }},
      {3, "exact recovery", 1.0, [](int) { return exact_recovery(); }},
      {4, "unbiased estimating function", 60.0, [](int) { return from_suite(validate_unbiased(vopts())); }},
      {5, "expected Jacobian identity", 120.0, [](int) { return from_suite(validate_jacobian(vopts())); }},
      {6, "consistency rate", 300.0, consistency_rate},
      {7, "nuisance consistency", 180.0, nuisance_consistency},
      {8, "sandwich consistency and coverage", 900.0, sandwich_coverage},
      {9, "nonsingular limit covariance", 900.0, nonsingular_limit},
      {10, "CLT diagnostics", 180.0, clt},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  bool all_ok = true;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(threads);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool ok = o.passed && in_time;
    all_ok = all_ok && ok;
    std::printf("%s criterion %d (%s): %s; %.2fs (< %.0fs)%s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " [x]");
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
