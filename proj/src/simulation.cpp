#include "ewtls/simulation.hpp"

#include "detail.hpp"
#include "ewtls/chi_square.hpp"
#include "ewtls/errors.hpp"
#include "ewtls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ewtls {

// ---------------------------------------------------------------------------
// Random streams

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

// Stream reserved for freezing A0; replicate streams use the replicate seed.
constexpr std::uint64_t kA0Stream = ~std::uint64_t{0};

double draw_standardized(ErrorLaw law, std::mt19937_64& rng) {
  switch (law) {
    case ErrorLaw::Gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case ErrorLaw::ScaledUniform: {
      std::uniform_real_distribution<double> unif(-std::sqrt(3.0), std::sqrt(3.0));
      return unif(rng);
    }
    case ErrorLaw::RademacherMixture: {
      std::bernoulli_distribution coin(0.5);
      if (coin(rng)) return coin(rng) ? 1.0 : -1.0;
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case ErrorLaw::CenteredExponential: {
      std::exponential_distribution<double> expo(1.0);
      return expo(rng) - 1.0;
    }
  }
  return 0.0;
}

Matrix lower_factor(const Matrix& cov) {
  if (cov.isZero(0.0)) return Matrix::Zero(cov.rows(), cov.cols());
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw InputError("covariance is not positive definite");
  return llt.matrixL();
}

// PSD factor for A0 row laws (allows singular covariances).
Matrix psd_factor(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(detail::symmetrize(cov));
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
    throw InputError("A0 row covariance is not positive semidefinite");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Matrix freeze_a0(const ScenarioSpec& spec) {
  const Dimensions& dims = spec.dims;
  if (spec.a0_law.kind == A0Law::Kind::Fixed) return spec.a0_law.a0;
  const Matrix factor = psd_factor(spec.a0_law.cov);
  auto rng = make_stream(spec.seed, kA0Stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a0(dims.m, dims.n);
  Vector z(dims.n);
  for (Index i = 0; i < dims.m; ++i) {
    for (Index k = 0; k < dims.n; ++k) z(k) = normal(rng);
    a0.row(i) = (spec.a0_law.mean + factor * z).transpose();
  }
  return a0;
}

ErrorStructure build_errors(const ScenarioSpec& spec) {
  if (spec.profile.kind == SigmaProfile::Kind::Constant) {
    return ErrorStructure::common(spec.j, spec.profile.sigma, spec.dims, spec.sigma2);
  }
  std::vector<Matrix> sig;
  sig.reserve(static_cast<std::size_t>(spec.dims.m));
  for (Index i = 0; i < spec.dims.m; ++i) sig.push_back(profile_sigma(spec.profile, i));
  return ErrorStructure(spec.j, std::move(sig), spec.dims, spec.sigma2);
}

}  // namespace

const char* to_string(ErrorLaw law) {
  switch (law) {
    case ErrorLaw::Gaussian: return "gaussian";
    case ErrorLaw::ScaledUniform: return "scaled_uniform";
    case ErrorLaw::RademacherMixture: return "rademacher_mixture";
    case ErrorLaw::CenteredExponential: return "centered_exponential";
  }
  return "unknown";
}

ErrorLaw error_law_from_string(const std::string& name) {
  if (name == "gaussian") return ErrorLaw::Gaussian;
  if (name == "scaled_uniform") return ErrorLaw::ScaledUniform;
  if (name == "rademacher_mixture") return ErrorLaw::RademacherMixture;
  if (name == "centered_exponential") return ErrorLaw::CenteredExponential;
  throw InputError("unknown error law '" + name + "'");
}

bool is_symmetric(ErrorLaw law) { return law != ErrorLaw::CenteredExponential; }

Matrix profile_sigma(const SigmaProfile& profile, Index row) {
  switch (profile.kind) {
    case SigmaProfile::Kind::Constant:
      return profile.sigma;
    case SigmaProfile::Kind::Converging:
      return profile.sigma * (1.0 + profile.gamma / static_cast<double>(row + 1));
    case SigmaProfile::Kind::PerRow:
      return profile.per_row.at(static_cast<std::size_t>(row));
  }
  return {};
}

void ScenarioSpec::validate() const {
  validate_dimensions(dims);
  if (x0.rows() != dims.n || x0.cols() != dims.d || !x0.allFinite()) {
    throw InputError("X0 must be a finite n x d matrix");
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InputError("sigma2 must be finite and nonnegative");
  }
  if (!is_symmetric(law) && !allow_asymmetric) {
    throw InputError(std::string("error law '") + to_string(law) +
                     "' is asymmetric; set allow_asymmetric_errors (unsupported)");
  }
  if (a0_law.kind == A0Law::Kind::Fixed) {
    if (a0_law.a0.rows() != dims.m || a0_law.a0.cols() != dims.n || !a0_law.a0.allFinite()) {
      throw InputError("fixed A0 must be a finite m x n matrix");
    }
  } else if (a0_law.mean.size() != dims.n || a0_law.cov.rows() != dims.n ||
             a0_law.cov.cols() != dims.n) {
    throw InputError("A0 row law needs an n-vector mean and an n x n covariance");
  }
  const auto jsize = static_cast<Index>(j.size());
  switch (profile.kind) {
    case SigmaProfile::Kind::Constant:
    case SigmaProfile::Kind::Converging:
      if (profile.sigma.rows() != jsize || profile.sigma.cols() != jsize) {
        throw InputError("Sigma must be |J| x |J|");
      }
      if (profile.kind == SigmaProfile::Kind::Converging && !(profile.gamma > -1.0)) {
        throw InputError("converging profile needs gamma > -1");
      }
      break;
    case SigmaProfile::Kind::PerRow:
      if (profile.per_row.size() != static_cast<std::size_t>(dims.m)) {
        throw InputError("per-row profile needs exactly m Sigma matrices");
      }
      break;
  }
}

ScenarioSpec default_scenario() {
  ScenarioSpec spec;
  spec.dims = {2000, 2, 1};
  spec.x0 = Matrix(2, 1);
  spec.x0 << 1.0, -0.5;
  spec.a0_law.kind = A0Law::Kind::IidRows;
  spec.a0_law.mean = Vector::Ones(2);
  spec.a0_law.cov = Vector(Eigen::Vector2d(1.0, 2.0)).asDiagonal();
  spec.j = {0, 1, 2};
  spec.sigma2 = 0.01;
  spec.profile.kind = SigmaProfile::Kind::Converging;
  spec.profile.sigma = Matrix::Identity(3, 3);
  spec.profile.gamma = 1.0;
  spec.law = ErrorLaw::Gaussian;
  spec.seed = 20240501;
  return spec;
}

Scenario::Scenario(ScenarioSpec spec)
    : spec_((spec.validate(), std::move(spec))),
      truth_(freeze_a0(spec_), spec_.x0),
      errors_(build_errors(spec_)) {
  switch (spec_.profile.kind) {
    case SigmaProfile::Kind::Constant:
    case SigmaProfile::Kind::Converging:
      sigma_inf_ = spec_.profile.sigma;
      break;
    case SigmaProfile::Kind::PerRow:
      sigma_inf_ = errors_.sigma(spec_.dims.m - 1);
      break;
  }
  factors_.reserve(errors_.distinct_count());
  for (const auto& s : errors_.sigmas()) factors_.push_back(lower_factor(spec_.sigma2 * s));
}

Matrix generate_errors(const Scenario& scenario, std::uint64_t replicate_seed) {
  const ScenarioSpec& spec = scenario.spec();
  const Dimensions& dims = spec.dims;
  const auto jsize = static_cast<Index>(spec.j.size());
  Matrix err = Matrix::Zero(dims.m, dims.p());
  if (spec.sigma2 == 0.0) return err;
  auto rng = make_stream(spec.seed, replicate_seed);
  Vector xi(jsize);
  for (Index i = 0; i < dims.m; ++i) {
    for (Index k = 0; k < jsize; ++k) xi(k) = draw_standardized(spec.law, rng);
    const Vector e = scenario.error_factor(i) * xi;
    for (Index k = 0; k < jsize; ++k) err(i, spec.j[static_cast<std::size_t>(k)]) = e(k);
  }
  return err;
}

Dataset generate_dataset(const Scenario& scenario, std::uint64_t replicate_seed) {
  const TrueModel& truth = scenario.truth();
  Matrix c = truth.c0;
  if (scenario.spec().sigma2 != 0.0) c += generate_errors(scenario, replicate_seed);
  return Dataset{ProblemData(std::move(c), scenario.spec().dims.n), scenario.errors(), truth};
}

Dataset generate_dataset(const ScenarioSpec& spec, std::uint64_t replicate_seed) {
  return generate_dataset(Scenario(spec), replicate_seed);
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

Vector direction_or_default(const McOptions& opts, Index d) {
  if (opts.u.size() == 0) return Vector::Unit(d, 0);
  if (opts.u.size() != d) throw InputError("direction u must have d entries");
  return opts.u;
}

}  // namespace

ReplicateOutcome run_replicate(const Scenario& scenario, std::uint64_t replicate,
                               const McOptions& opts) {
  const Dimensions& dims = scenario.spec().dims;
  const Vector u = direction_or_default(opts, dims.d);
  ReplicateOutcome out;
  out.replicate = replicate;
  Dataset ds = generate_dataset(scenario, replicate);
  const ObjectiveContext ctx(std::move(ds.data), std::move(ds.errors), 1);
  try {
    const EstimationResult est = ewtls_solve(ctx, opts.solver);
    out.converged = est.converged;
    out.iterations = est.iterations;
    out.x_hat = est.x_hat;
    out.error_norm = (est.x_hat - scenario.truth().x0).norm();
    if (!est.converged) {
      out.note = est.message;
      return out;
    }
    const NuisanceEstimates nu = estimate_nuisance(ctx, est.x_hat);
    out.sigma2_hat = nu.sigma2_hat;
    out.va_hat = nu.va_hat;
    const CovarianceEstimate cov = sandwich_su(ctx, est.x_hat, nu.va_hat, u);
    out.su_available = true;
    out.su_hat = cov.su_hat;
    const ConfidenceEllipsoid ell = confidence_ellipsoid(est.x_hat, cov, dims.m, opts.level);
    out.ellipsoid_available = true;
    const Vector truth_u = scenario.truth().x0 * u;
    out.statistic = ell.statistic(truth_u);
    out.covers = ell.contains(truth_u);
  } catch (const Error& e) {
    out.note = e.what();
  }
  return out;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

McSummary summarize(const Scenario& scenario, const std::vector<ReplicateOutcome>& outcomes,
                    const McOptions& opts) {
  const ScenarioSpec& spec = scenario.spec();
  const Dimensions& dims = spec.dims;
  const Vector u = direction_or_default(opts, dims.d);
  const double sqrt_m = std::sqrt(static_cast<double>(dims.m));
  const Vector truth_u = scenario.truth().x0 * u;

  McSummary s;
  s.m = dims.m;
  s.replicates = static_cast<int>(outcomes.size());
  s.u = u;
  s.level = opts.level;
  s.sigma2_true = spec.sigma2;
  s.va_reference = scenario.truth().a0.transpose() * scenario.truth().a0 /
                   static_cast<double>(dims.m);

  std::vector<double> errors;
  std::vector<Vector> devs;
  std::vector<double> stats;
  Matrix su_sum = Matrix::Zero(dims.n, dims.n);
  Matrix va_sum = Matrix::Zero(dims.n, dims.n);
  double sigma2_sum = 0.0;
  int covered = 0;
  int su_count = 0;
  for (const auto& o : outcomes) {
    if (!o.converged) continue;
    ++s.converged;
    errors.push_back(o.error_norm);
    devs.push_back(sqrt_m * (o.x_hat * u - truth_u));
    sigma2_sum += o.sigma2_hat;
    if (o.va_hat.size() > 0) va_sum += o.va_hat;
    if (o.su_available) {
      su_sum += o.su_hat;
      ++su_count;
    }
    if (o.ellipsoid_available) {
      ++s.ellipsoids;
      stats.push_back(o.statistic);
      if (o.covers) ++covered;
    }
  }
  s.nonconverged_fraction =
      s.replicates > 0 ? 1.0 - static_cast<double>(s.converged) / s.replicates : 0.0;
  s.valid = s.replicates > 0 && s.nonconverged_fraction <= kMaxNonconvergedFraction;
  s.degenerate = spec.sigma2 == 0.0 || s.ellipsoids == 0;

  if (s.converged > 0) {
    const double k = s.converged;
    s.median_error = empirical_quantile(errors, 0.5);
    s.mean_error = std::accumulate(errors.begin(), errors.end(), 0.0) / k;
    s.mean_sigma2 = sigma2_sum / k;
    s.mean_va = va_sum / k;
    Vector mean = Vector::Zero(dims.n);
    for (const auto& v : devs) mean += v;
    mean /= k;
    s.empirical_cov = Matrix::Zero(dims.n, dims.n);
    for (const auto& v : devs) s.empirical_cov += (v - mean) * (v - mean).transpose();
    s.empirical_cov /= std::max(1.0, k - 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.empirical_cov, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues()(dims.n - 1);
    s.empirical_cov_eig_ratio = lmax > 0.0 ? eig.eigenvalues()(0) / lmax : 0.0;
  }
  if (su_count > 0) {
    s.mean_su = su_sum / su_count;
    const double denom = s.mean_su.norm();
    s.su_relative_diff = denom > 0.0 ? (s.empirical_cov - s.mean_su).norm() / denom
                                     : std::numeric_limits<double>::infinity();
  }
  for (std::size_t q = 0; q < kStatisticQuantileLevels.size(); ++q) {
    s.chi2_quantiles[q] =
        chi_square_quantile(kStatisticQuantileLevels[q], static_cast<double>(dims.n));
    s.statistic_quantiles[q] = empirical_quantile(stats, kStatisticQuantileLevels[q]);
  }
  if (s.ellipsoids > 0) s.coverage = static_cast<double>(covered) / s.ellipsoids;
  return s;
}

McResult run_monte_carlo(const ScenarioSpec& spec, int replicates, const McOptions& opts) {
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (!(opts.level > 0.0 && opts.level < 1.0)) throw InputError("level must lie in (0, 1)");
  opts.solver.validate();
  const Scenario scenario(spec);
  direction_or_default(opts, spec.dims.d);

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(replicates));
  std::vector<std::exception_ptr> failures(outcomes.size());
  const int nt = kernels::resolve_threads(opts.threads);
  (void)nt;
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int k = 0; k < replicates; ++k) {
    const auto slot = static_cast<std::size_t>(k);
    try {
      outcomes[slot] = run_replicate(scenario, static_cast<std::uint64_t>(k), opts);
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  McResult res;
  res.summary = summarize(scenario, outcomes, opts);
  res.outcomes = std::move(outcomes);
  return res;
}

// ---------------------------------------------------------------------------
// CLT diagnostics

namespace {

struct Moments {
  double mean = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments central_moments(const Vector& x) {
  Moments mo;
  const double r = static_cast<double>(x.size());
  mo.mean = x.mean();
  for (Index k = 0; k < x.size(); ++k) {
    const double dv = x(k) - mo.mean;
    const double d2 = dv * dv;
    mo.m2 += d2;
    mo.m3 += d2 * dv;
    mo.m4 += d2 * d2;
  }
  mo.m2 /= r;
  mo.m3 /= r;
  mo.m4 /= r;
  return mo;
}

}  // namespace

CltReport clt_diagnostics(const ScenarioSpec& spec, int replicates, int threads) {
  if (replicates < 3) throw InputError("CLT diagnostics need at least 3 replicates");
  const Scenario scenario(spec);
  const Dimensions& dims = spec.dims;
  const Matrix& a0 = scenario.truth().a0;
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(dims.m));

  // sigma^2 sum_i S_i restricted to J (S_i vanishes outside J).
  const auto jsize = static_cast<Index>(spec.j.size());
  Matrix sum_cov = Matrix::Zero(jsize, jsize);
  for (Index i = 0; i < dims.m; ++i) sum_cov += scenario.errors().sigma(i);
  sum_cov *= spec.sigma2;

  std::vector<std::string> g1_names, g2_names;
  for (Index r = 0; r < dims.n; ++r)
    for (Index c : spec.j)
      g1_names.push_back("G1[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]");
  for (Index r = 0; r < jsize; ++r)
    for (Index c = r; c < jsize; ++c)
      g2_names.push_back("G2[" + std::to_string(spec.j[r] + 1) + "," +
                         std::to_string(spec.j[c] + 1) + "]");
  const auto n1 = static_cast<Index>(g1_names.size());
  const auto n2 = static_cast<Index>(g2_names.size());

  Matrix g1(replicates, n1), g2(replicates, n2);
  const int nt = kernels::resolve_threads(threads);
  (void)nt;
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int k = 0; k < replicates; ++k) {
    const Matrix err = generate_errors(scenario, static_cast<std::uint64_t>(k));
    const Matrix ej = restrict_rows(err.transpose(), spec.j).transpose();  // m x |J|
    const Matrix w1 = inv_sqrt_m * (a0.transpose() * ej);                   // n x |J|
    const Matrix w2 = inv_sqrt_m * (ej.transpose() * ej - sum_cov);        // |J| x |J|
    Index e = 0;
    for (Index r = 0; r < dims.n; ++r)
      for (Index c = 0; c < jsize; ++c) g1(k, e++) = w1(r, c);
    e = 0;
    for (Index r = 0; r < jsize; ++r)
      for (Index c = r; c < jsize; ++c) g2(k, e++) = w2(r, c);
  }

  CltReport rep;
  rep.replicates = replicates;
  rep.m = dims.m;
  rep.cross_cov = Matrix::Zero(n1, n2);
  rep.cross_cov_z = Matrix::Zero(n1, n2);
  if (spec.sigma2 == 0.0 || (g1.cwiseAbs().maxCoeff() == 0.0 && g2.cwiseAbs().maxCoeff() == 0.0)) {
    rep.zero_components = true;
    return rep;
  }
  const double r = replicates;
  auto add_entry = [&](const std::string& name, const Vector& x) {
    const Moments mo = central_moments(x);
    EntryStat st;
    st.name = name;
    st.mean = mo.mean;
    if (mo.m2 > 0.0) {
      st.mean_z = mo.mean / std::sqrt(mo.m2 * r / (r - 1.0) / r);
      st.skewness = mo.m3 / std::pow(mo.m2, 1.5);
      st.skewness_z = st.skewness / std::sqrt(6.0 / r);
      st.excess_kurtosis = mo.m4 / (mo.m2 * mo.m2) - 3.0;
      st.kurtosis_z = st.excess_kurtosis / std::sqrt(24.0 / r);
    }
    rep.max_abs_mean_z = std::max(rep.max_abs_mean_z, std::abs(st.mean_z));
    rep.max_abs_skewness_z = std::max(rep.max_abs_skewness_z, std::abs(st.skewness_z));
    rep.entries.push_back(std::move(st));
  };
  for (Index e = 0; e < n1; ++e) add_entry(g1_names[static_cast<std::size_t>(e)], g1.col(e));
  for (Index e = 0; e < n2; ++e) add_entry(g2_names[static_cast<std::size_t>(e)], g2.col(e));

  const Vector mean1 = g1.colwise().mean().transpose();
  const Vector mean2 = g2.colwise().mean().transpose();
  for (Index a = 0; a < n1; ++a) {
    for (Index b = 0; b < n2; ++b) {
      const Vector prod = (g1.col(a).array() - mean1(a)) * (g2.col(b).array() - mean2(b));
      const double cov = prod.mean();
      const double sd = std::sqrt((prod.array() - cov).square().sum() / (r - 1.0));
      rep.cross_cov(a, b) = cov;
      rep.cross_cov_z(a, b) = sd > 0.0 ? cov / (sd / std::sqrt(r)) : 0.0;
    }
  }
  rep.max_abs_cross_z = rep.cross_cov_z.cwiseAbs().maxCoeff();
  rep.means_ok = rep.max_abs_mean_z <= rep.threshold;
  rep.independence_ok = rep.max_abs_cross_z <= rep.threshold;
  rep.skewness_ok = rep.max_abs_skewness_z <= rep.threshold;
  return rep;
}

// ---------------------------------------------------------------------------
// Conditions

ConditionReport check_conditions(const ScenarioSpec& spec) {
  const Scenario scenario(spec);
  const Dimensions& dims = spec.dims;
  ConditionReport rep;
  rep.kappa2 = scenario.errors().kappa2();
  const Matrix& a0 = scenario.truth().a0;
  rep.va_m = a0.transpose() * a0 / static_cast<double>(dims.m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rep.va_m, Eigen::EigenvaluesOnly);
  rep.va_min_eigenvalue = eig.eigenvalues()(0);
  rep.sigma_inf = scenario.sigma_inf();
  rep.tail_deviation_last = (scenario.errors().sigma(dims.m - 1) - rep.sigma_inf).norm();
  for (Index i = dims.m / 2; i < dims.m; ++i) {
    rep.tail_deviation_max =
        std::max(rep.tail_deviation_max, (scenario.errors().sigma(i) - rep.sigma_inf).norm());
  }
  rep.symmetric_law = is_symmetric(spec.law);

  if (!(rep.kappa2 > 0.0)) rep.violations.emplace_back("lambda_min(Sigma_i) >= kappa^2 > 0 fails");
  if (!(rep.va_min_eigenvalue > 0.0)) {
    rep.violations.emplace_back("m^{-1} A0^T A0 is singular (V_A must be nonsingular)");
  }
  if (!rep.symmetric_law) {
    rep.violations.emplace_back("error law is asymmetric: vanishing third moments not guaranteed");
  }
  if (dims.underdetermined()) rep.violations.emplace_back("m <= n");
  if (!check_rank_constraint(ParamZ(spec.x0), spec.j)) {
    rep.violations.emplace_back("rank(Z0_J) < d");
  }
  return rep;
}

}  // namespace ewtls
