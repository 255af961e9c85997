#pragma once

// File formats:
//   data CSV      m rows, n + d numeric columns (A then B), optional header.
//   covariance    {"J": [1-based], "sigma_common": [[..]] | "sigma_per_row": [[[..]], ..],
//                  "sigma2": optional}
//   scenario      JSON mirror of ScenarioSpec (see scenario_from_json)
// Output floats are written round-trip exact.

#include "ewtls/inference.hpp"
#include "ewtls/simulation.hpp"
#include "ewtls/solver.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace ewtls::io {

using nlohmann::json;

/// Parses a CSV of doubles. Throws InputError naming the line and field of the
/// first malformed entry.
Matrix parse_csv(std::istream& in, bool header);
Matrix read_csv(const std::string& path, bool header);

/// Converts 1-based column indices to the internal 0-based IndexSet.
IndexSet from_one_based(const json& j, Index p);
json to_one_based(const IndexSet& j);

ErrorStructure cov_from_json(const json& doc, const Dimensions& dims);
ErrorStructure read_cov(const std::string& path, const Dimensions& dims);

json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);
/// Throws InputError mentioning `field` on shape problems.
Matrix matrix_from_json(const json& j, const std::string& field);
Vector vector_from_json(const json& j, const std::string& field);

ScenarioSpec scenario_from_json(const json& doc);
json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec read_scenario(const std::string& path);

struct EstimateReport {
  EstimationResult estimate;
  std::optional<NuisanceEstimates> nuisance;
  std::optional<CovarianceEstimate> covariance;
  std::optional<ConfidenceEllipsoid> ellipsoid;
  std::string method = "ewtls";
  Dimensions dims;
  bool va_indefinite_warning = false;
  std::vector<std::string> warnings;
};

json estimate_to_json(const EstimateReport& report);
json summary_to_json(const McSummary& summary);
json clt_to_json(const CltReport& report);
json conditions_to_json(const ConditionReport& report);

/// One line per replicate; floats with 17 significant digits.
void write_replicates_csv(std::ostream& out, const std::vector<ReplicateOutcome>& outcomes);

void write_json(const std::string& path, const json& doc);
json read_json(const std::string& path);

}  // namespace ewtls::io
