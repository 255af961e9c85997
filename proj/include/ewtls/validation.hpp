#pragma once

// Self-checks run by `ewtls validate`: finite-difference gradient, the
// homoscedastic TLS oracle with exact recovery, unbiasedness of s at X0 and
// the expected Jacobian identity. Each check records its measured value.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ewtls {

struct ValidationOptions {
  std::vector<std::string> suites;  // empty = all
  bool quick = false;               // caps Monte Carlo at 1e4 draws, 2x tolerances
  std::uint64_t seed = 12345;
  int threads = 0;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool passed() const;
};

struct ValidationReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& validation_suite_names();

SuiteResult validate_gradient(const ValidationOptions& opts);
SuiteResult validate_oracle(const ValidationOptions& opts);
SuiteResult validate_unbiased(const ValidationOptions& opts);
SuiteResult validate_jacobian(const ValidationOptions& opts);

/// Throws InputError for an unknown suite name.
ValidationReport run_validation(const ValidationOptions& opts);

}  // namespace ewtls
