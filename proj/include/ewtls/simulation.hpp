#pragma once

// Synthetic data for the errors-in-variables model and Monte Carlo studies of
// the estimator's consistency, asymptotic normality and interval coverage.

#include "ewtls/inference.hpp"
#include "ewtls/model.hpp"
#include "ewtls/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ewtls {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Independent engine for `stream` under `seed`, derived by hashing rather
/// than sequencing, so replicates can be generated in any order.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Standardized (zero mean, unit variance) law of the error coordinates.
enum class ErrorLaw {
  Gaussian,
  ScaledUniform,      // U(-sqrt 3, sqrt 3)
  RademacherMixture,  // random sign w.p. 1/2, else N(0, 1)
  CenteredExponential // Exp(1) - 1; asymmetric, exploratory only
};

const char* to_string(ErrorLaw law);
ErrorLaw error_law_from_string(const std::string& name);
bool is_symmetric(ErrorLaw law);

struct A0Law {
  enum class Kind { Fixed, IidRows };
  Kind kind = Kind::IidRows;
  Matrix a0;    // Fixed: m x n
  Vector mean;  // IidRows
  Matrix cov;   // IidRows, n x n PSD
};

struct SigmaProfile {
  enum class Kind { Constant, Converging, PerRow };
  Kind kind = Kind::Constant;
  Matrix sigma;                  // Constant: Sigma; Converging: Sigma_inf
  double gamma = 0.0;            // Converging: Sigma_i = Sigma_inf (1 + gamma / i)
  std::vector<Matrix> per_row;   // PerRow
};

struct ScenarioSpec {
  Dimensions dims;
  Matrix x0;
  A0Law a0_law;
  IndexSet j;
  double sigma2 = 0.01;
  SigmaProfile profile;
  ErrorLaw law = ErrorLaw::Gaussian;
  bool allow_asymmetric = false;
  std::uint64_t seed = 20240501;

  /// Throws InputError on inconsistent shapes, non-SPD Sigma, asymmetric law
  /// without allow_asymmetric, ...
  void validate() const;
};

/// n = 2, d = 1, m = 2000, X0 = (1, -0.5)^T, A0 rows frozen from
/// N((1, 1), diag(1, 2)), J = {1, 2, 3}, sigma^2 = 0.01,
/// Sigma_i = I_3 (1 + 1/i).
ScenarioSpec default_scenario();

/// A validated scenario with A0 frozen and the per-row error factors cached.
class Scenario {
 public:
  explicit Scenario(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const TrueModel& truth() const { return truth_; }
  const ErrorStructure& errors() const { return errors_; }
  /// Limit Sigma_inf (for PerRow profiles, Sigma_m as the best available proxy).
  const Matrix& sigma_inf() const { return sigma_inf_; }

  /// Lower Cholesky factor of sigma^2 Sigma_i.
  const Matrix& error_factor(Index row) const {
    return factors_[factors_.size() == 1 ? 0 : static_cast<std::size_t>(row)];
  }

 private:
  ScenarioSpec spec_;
  TrueModel truth_;
  ErrorStructure errors_;
  Matrix sigma_inf_;
  std::vector<Matrix> factors_;
};

/// Sigma_i for 0-based row i under the profile.
Matrix profile_sigma(const SigmaProfile& profile, Index row);

/// Error matrix C~ (m x (n+d)), zero outside the columns J.
Matrix generate_errors(const Scenario& scenario, std::uint64_t replicate_seed);

struct Dataset {
  ProblemData data;
  ErrorStructure errors;
  TrueModel truth;
};

Dataset generate_dataset(const Scenario& scenario, std::uint64_t replicate_seed);
Dataset generate_dataset(const ScenarioSpec& spec, std::uint64_t replicate_seed);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct ReplicateOutcome {
  std::uint64_t replicate = 0;
  bool converged = false;
  int iterations = 0;
  Matrix x_hat;
  double error_norm = 0.0;  // ||X_hat - X0||_F
  double sigma2_hat = 0.0;
  Matrix va_hat;
  bool su_available = false;
  Matrix su_hat;
  bool ellipsoid_available = false;
  double statistic = 0.0;  // m (X_hat u - X0 u)^T S_u^{-1} (X_hat u - X0 u)
  bool covers = false;
  std::string note;
};

struct McOptions {
  Vector u;  // defaults to e_1 when empty
  double level = 0.95;
  SolverOptions solver;
  int threads = 0;
};

inline constexpr std::array<double, 3> kStatisticQuantileLevels{0.5, 0.9, 0.95};
inline constexpr double kMaxNonconvergedFraction = 0.05;

struct McSummary {
  Index m = 0;
  int replicates = 0;
  int converged = 0;
  double nonconverged_fraction = 0.0;
  bool valid = true;       // nonconverged_fraction <= 5%
  bool degenerate = false; // no ellipsoid could be formed (e.g. sigma^2 = 0)
  Vector u;
  double level = 0.95;
  double median_error = 0.0;
  double mean_error = 0.0;
  Matrix empirical_cov;  // covariance of sqrt(m) (X_hat u - X0 u)
  Matrix mean_su;        // mean S_u estimate
  double su_relative_diff = 0.0;  // ||empirical_cov - mean_su||_F / ||mean_su||_F
  double empirical_cov_eig_ratio = 0.0;  // lambda_min / lambda_max
  int ellipsoids = 0;
  std::optional<double> coverage;
  std::array<double, 3> statistic_quantiles{};
  std::array<double, 3> chi2_quantiles{};
  double sigma2_true = 0.0;
  double mean_sigma2 = 0.0;
  Matrix mean_va;
  Matrix va_reference;  // m^{-1} A0^T A0
};

struct McResult {
  McSummary summary;
  std::vector<ReplicateOutcome> outcomes;
};

ReplicateOutcome run_replicate(const Scenario& scenario, std::uint64_t replicate,
                               const McOptions& opts);

/// Replicates run concurrently; aggregation is ordered by replicate index.
McResult run_monte_carlo(const ScenarioSpec& spec, int replicates, const McOptions& opts);

McSummary summarize(const Scenario& scenario, const std::vector<ReplicateOutcome>& outcomes,
                    const McOptions& opts);

/// Type-7 (linear interpolation) empirical quantile.
double empirical_quantile(std::vector<double> values, double p);

// ---------------------------------------------------------------------------
// CLT diagnostics for m^{-1/2} sum_i W_i,
// W_i = (a0_i c~_i^T, c~_i c~_i^T - sigma^2 S_i).
// ---------------------------------------------------------------------------

struct EntryStat {
  std::string name;  // "G1[r,c]" or "G2[r,c]" (1-based)
  double mean = 0.0;
  double mean_z = 0.0;
  double skewness = 0.0;
  double skewness_z = 0.0;
  double excess_kurtosis = 0.0;
  double kurtosis_z = 0.0;
};

struct CltReport {
  int replicates = 0;
  Index m = 0;
  bool zero_components = false;  // every entry identically zero
  std::vector<EntryStat> entries;
  Matrix cross_cov;    // rows: G1 entries, cols: G2 entries
  Matrix cross_cov_z;  // z-scores of cross_cov
  double max_abs_mean_z = 0.0;
  double max_abs_cross_z = 0.0;
  double max_abs_skewness_z = 0.0;
  double threshold = 4.0;
  bool means_ok = true;
  bool independence_ok = true;
  bool skewness_ok = true;
};

CltReport clt_diagnostics(const ScenarioSpec& spec, int replicates, int threads = 0);

// ---------------------------------------------------------------------------
// Scenario conditions checkable from the inputs.
// ---------------------------------------------------------------------------

struct ConditionReport {
  double kappa2 = 0.0;            // min_i lambda_min(Sigma_i)
  Matrix va_m;                    // m^{-1} A0^T A0
  double va_min_eigenvalue = 0.0;
  Matrix sigma_inf;
  double tail_deviation_last = 0.0;  // ||Sigma_m - Sigma_inf||_F
  double tail_deviation_max = 0.0;   // max over the second half of the rows
  bool symmetric_law = true;
  std::vector<std::string> violations;
};

ConditionReport check_conditions(const ScenarioSpec& spec);

}  // namespace ewtls
