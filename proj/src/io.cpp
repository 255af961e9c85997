#include "ewtls/io.hpp"

#include "ewtls/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ewtls::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line, std::size_t col) {
  std::string_view t = trim(field);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw InputError("line " + std::to_string(line) + ", field " + std::to_string(col) +
                     ": cannot parse '" + std::string(trim(field)) + "' as a finite number");
  }
  return value;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Matrix parse_csv(std::istream& in, bool header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (header && lineno == 1) continue;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col = 1;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(parse_double(field, lineno, col));
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++col;
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("data file contains no rows");
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < width; ++k)
      out(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  return out;
}

Matrix read_csv(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return parse_csv(in, header);
}

IndexSet from_one_based(const json& j, Index p) {
  if (!j.is_array() || j.empty()) throw InputError("field 'J' must be a nonempty array");
  IndexSet out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw InputError("field 'J' must hold integers");
    const auto idx = e.get<long long>();
    if (idx < 1 || idx > p) {
      throw InputError("field 'J': index " + std::to_string(idx) + " out of range 1.." +
                       std::to_string(p));
    }
    out.push_back(static_cast<Index>(idx - 1));
  }
  return out;
}

json to_one_based(const IndexSet& j) {
  json out = json::array();
  for (Index k : j) out.push_back(k + 1);
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw InputError("field '" + field + "' must be a nonempty array of rows");
  }
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError("field '" + field + "': row " + std::to_string(r + 1) +
                       " must have " + std::to_string(cols) + " entries");
    }
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (!e.is_number()) {
        throw InputError("field '" + field + "': entry (" + std::to_string(r + 1) + "," +
                         std::to_string(c + 1) + ") is not a number");
      }
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("field '" + field + "' must be a nonempty array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) {
      throw InputError("field '" + field + "': entry " + std::to_string(k + 1) + " is not a number");
    }
    v(static_cast<Index>(k)) = j[k].get<double>();
  }
  return v;
}

ErrorStructure cov_from_json(const json& doc, const Dimensions& dims) {
  if (!doc.is_object()) throw InputError("covariance file must hold a JSON object");
  if (!doc.contains("J")) throw InputError("covariance file: missing field 'J'");
  IndexSet j = from_one_based(doc.at("J"), dims.p());
  std::optional<double> sigma2;
  if (doc.contains("sigma2") && !doc.at("sigma2").is_null()) {
    if (!doc.at("sigma2").is_number()) throw InputError("field 'sigma2' must be a number");
    sigma2 = doc.at("sigma2").get<double>();
  }
  const bool has_common = doc.contains("sigma_common");
  const bool has_rows = doc.contains("sigma_per_row");
  if (has_common == has_rows) {
    throw InputError("covariance file needs exactly one of 'sigma_common' or 'sigma_per_row'");
  }
  if (has_common) {
    return ErrorStructure::common(std::move(j), matrix_from_json(doc.at("sigma_common"), "sigma_common"),
                                  dims, sigma2);
  }
  const auto& list = doc.at("sigma_per_row");
  if (!list.is_array()) throw InputError("field 'sigma_per_row' must be an array");
  std::vector<Matrix> sig;
  sig.reserve(static_cast<std::size_t>(dims.m));
  for (Index i = 0; i < dims.m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (k >= list.size() || list[k].is_null()) {
      throw InputError("sigma_per_row: missing Sigma for row " + std::to_string(i + 1));
    }
    sig.push_back(matrix_from_json(list[k], "sigma_per_row[" + std::to_string(i + 1) + "]"));
  }
  if (list.size() > static_cast<std::size_t>(dims.m)) {
    throw InputError("sigma_per_row has " + std::to_string(list.size()) +
                     " entries but the data has " + std::to_string(dims.m) + " rows");
  }
  return ErrorStructure(std::move(j), std::move(sig), dims, sigma2);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

ErrorStructure read_cov(const std::string& path, const Dimensions& dims) {
  return cov_from_json(read_json(path), dims);
}

ScenarioSpec scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("scenario must be a JSON object");
  ScenarioSpec spec = default_scenario();
  auto get_int = [&](const char* key, Index fallback) {
    if (!doc.contains(key)) return fallback;
    if (!doc.at(key).is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
    return static_cast<Index>(doc.at(key).get<long long>());
  };
  spec.dims.m = get_int("m", spec.dims.m);
  spec.dims.n = get_int("n", spec.dims.n);
  spec.dims.d = get_int("d", spec.dims.d);
  if (doc.contains("X0")) spec.x0 = matrix_from_json(doc.at("X0"), "X0");
  if (doc.contains("a0_law")) {
    const auto& law = doc.at("a0_law");
    const std::string type = law.value("type", "");
    if (type == "fixed") {
      spec.a0_law.kind = A0Law::Kind::Fixed;
      spec.a0_law.a0 = matrix_from_json(law.at("A0"), "a0_law.A0");
    } else if (type == "iid_rows") {
      spec.a0_law.kind = A0Law::Kind::IidRows;
      spec.a0_law.mean = vector_from_json(law.at("mean"), "a0_law.mean");
      spec.a0_law.cov = matrix_from_json(law.at("cov"), "a0_law.cov");
    } else {
      throw InputError("a0_law.type must be 'fixed' or 'iid_rows'");
    }
  }
  if (doc.contains("J")) spec.j = from_one_based(doc.at("J"), spec.dims.p());
  if (doc.contains("sigma2")) {
    if (!doc.at("sigma2").is_number()) throw InputError("field 'sigma2' must be a number");
    spec.sigma2 = doc.at("sigma2").get<double>();
  }
  if (doc.contains("sigma_profile")) {
    const auto& prof = doc.at("sigma_profile");
    const std::string type = prof.value("type", "");
    SigmaProfile p;
    if (type == "constant") {
      p.kind = SigmaProfile::Kind::Constant;
      p.sigma = matrix_from_json(prof.at("sigma"), "sigma_profile.sigma");
    } else if (type == "converging") {
      p.kind = SigmaProfile::Kind::Converging;
      p.sigma = matrix_from_json(prof.at("sigma_inf"), "sigma_profile.sigma_inf");
      p.gamma = prof.value("gamma", 1.0);
    } else if (type == "per_row") {
      p.kind = SigmaProfile::Kind::PerRow;
      for (const auto& s : prof.at("sigmas")) {
        p.per_row.push_back(matrix_from_json(s, "sigma_profile.sigmas"));
      }
    } else {
      throw InputError("sigma_profile.type must be 'constant', 'converging' or 'per_row'");
    }
    spec.profile = std::move(p);
  }
  if (doc.contains("error_law")) spec.law = error_law_from_string(doc.at("error_law").get<std::string>());
  spec.allow_asymmetric = doc.value("allow_asymmetric_errors", false);
  if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

json scenario_to_json(const ScenarioSpec& spec) {
  json doc;
  doc["m"] = spec.dims.m;
  doc["n"] = spec.dims.n;
  doc["d"] = spec.dims.d;
  doc["X0"] = matrix_to_json(spec.x0);
  if (spec.a0_law.kind == A0Law::Kind::Fixed) {
    doc["a0_law"] = {{"type", "fixed"}, {"A0", matrix_to_json(spec.a0_law.a0)}};
  } else {
    doc["a0_law"] = {{"type", "iid_rows"},
                     {"mean", vector_to_json(spec.a0_law.mean)},
                     {"cov", matrix_to_json(spec.a0_law.cov)}};
  }
  doc["J"] = to_one_based(spec.j);
  doc["sigma2"] = spec.sigma2;
  switch (spec.profile.kind) {
    case SigmaProfile::Kind::Constant:
      doc["sigma_profile"] = {{"type", "constant"}, {"sigma", matrix_to_json(spec.profile.sigma)}};
      break;
    case SigmaProfile::Kind::Converging:
      doc["sigma_profile"] = {{"type", "converging"},
                              {"sigma_inf", matrix_to_json(spec.profile.sigma)},
                              {"gamma", spec.profile.gamma}};
      break;
    case SigmaProfile::Kind::PerRow: {
      json list = json::array();
      for (const auto& s : spec.profile.per_row) list.push_back(matrix_to_json(s));
      doc["sigma_profile"] = {{"type", "per_row"}, {"sigmas", std::move(list)}};
      break;
    }
  }
  doc["error_law"] = to_string(spec.law);
  doc["allow_asymmetric_errors"] = spec.allow_asymmetric;
  doc["seed"] = spec.seed;
  return doc;
}

ScenarioSpec read_scenario(const std::string& path) { return scenario_from_json(read_json(path)); }

json estimate_to_json(const EstimateReport& r) {
  json doc;
  doc["method"] = r.method;
  doc["dims"] = {{"m", r.dims.m}, {"n", r.dims.n}, {"d", r.dims.d}};
  doc["X_hat"] = matrix_to_json(r.estimate.x_hat);
  if (r.nuisance) {
    doc["sigma2_hat"] = r.nuisance->sigma2_hat;
    doc["VA_hat"] = matrix_to_json(r.nuisance->va_hat);
  } else {
    doc["sigma2_hat"] = nullptr;
    doc["VA_hat"] = nullptr;
  }
  if (r.covariance) {
    doc["Su_hat"] = {{"u", vector_to_json(r.covariance->u)},
                     {"matrix", matrix_to_json(r.covariance->su_hat)}};
  }
  if (r.ellipsoid) {
    doc["ellipsoid"] = {{"center", vector_to_json(r.ellipsoid->center)},
                        {"shape", matrix_to_json(r.ellipsoid->shape)},
                        {"level", r.ellipsoid->level},
                        {"radius2", r.ellipsoid->radius2}};
  }
  doc["diagnostics"] = {{"Q_min", r.estimate.q_min},
                        {"grad_norm", r.estimate.grad_norm},
                        {"eq_residual_norm", r.estimate.eq_residual_norm},
                        {"iterations", r.estimate.iterations},
                        {"converged", r.estimate.converged},
                        {"init", to_string(r.estimate.init_used)},
                        {"message", r.estimate.message},
                        {"VA_indefinite", r.va_indefinite_warning},
                        {"warnings", r.warnings}};
  return doc;
}

json summary_to_json(const McSummary& s) {
  json doc;
  doc["m"] = s.m;
  doc["replicates"] = s.replicates;
  doc["converged"] = s.converged;
  doc["nonconverged_fraction"] = s.nonconverged_fraction;
  doc["valid"] = s.valid;
  doc["degenerate"] = s.degenerate;
  doc["u"] = vector_to_json(s.u);
  doc["level"] = s.level;
  doc["median_error"] = s.median_error;
  doc["mean_error"] = s.mean_error;
  doc["empirical_cov"] = s.empirical_cov.size() ? matrix_to_json(s.empirical_cov) : json(nullptr);
  doc["mean_Su_hat"] = s.mean_su.size() ? matrix_to_json(s.mean_su) : json(nullptr);
  doc["Su_relative_diff"] = s.mean_su.size() ? json(s.su_relative_diff) : json(nullptr);
  doc["empirical_cov_eig_ratio"] = s.empirical_cov_eig_ratio;
  doc["ellipsoids"] = s.ellipsoids;
  doc["coverage"] = s.coverage ? json(*s.coverage) : json(nullptr);
  json q = json::array();
  for (std::size_t k = 0; k < kStatisticQuantileLevels.size(); ++k) {
    const double v = s.statistic_quantiles[k];
    q.push_back({{"level", kStatisticQuantileLevels[k]},
                 {"empirical", std::isfinite(v) ? json(v) : json(nullptr)},
                 {"chi2", s.chi2_quantiles[k]}});
  }
  doc["statistic_quantiles"] = std::move(q);
  doc["sigma2_true"] = s.sigma2_true;
  doc["mean_sigma2_hat"] = s.mean_sigma2;
  doc["mean_VA_hat"] = s.mean_va.size() ? matrix_to_json(s.mean_va) : json(nullptr);
  doc["VA_reference"] = matrix_to_json(s.va_reference);
  return doc;
}

json clt_to_json(const CltReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"name", e.name},
                       {"mean", e.mean},
                       {"mean_z", e.mean_z},
                       {"skewness", e.skewness},
                       {"skewness_z", e.skewness_z},
                       {"excess_kurtosis", e.excess_kurtosis},
                       {"kurtosis_z", e.kurtosis_z}});
  }
  return {{"replicates", r.replicates},
          {"m", r.m},
          {"zero_components", r.zero_components},
          {"entries", std::move(entries)},
          {"cross_cov", matrix_to_json(r.cross_cov)},
          {"cross_cov_z", matrix_to_json(r.cross_cov_z)},
          {"max_abs_mean_z", r.max_abs_mean_z},
          {"max_abs_cross_z", r.max_abs_cross_z},
          {"max_abs_skewness_z", r.max_abs_skewness_z},
          {"threshold", r.threshold},
          {"means_ok", r.means_ok},
          {"independence_ok", r.independence_ok},
          {"skewness_ok", r.skewness_ok}};
}

json conditions_to_json(const ConditionReport& r) {
  return {{"kappa2", r.kappa2},
          {"VA_m", matrix_to_json(r.va_m)},
          {"VA_min_eigenvalue", r.va_min_eigenvalue},
          {"sigma_inf", matrix_to_json(r.sigma_inf)},
          {"tail_deviation_last", r.tail_deviation_last},
          {"tail_deviation_max", r.tail_deviation_max},
          {"symmetric_law", r.symmetric_law},
          {"violations", r.violations}};
}

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateOutcome>& outcomes) {
  Index n = 0, d = 0;
  for (const auto& o : outcomes) {
    if (o.x_hat.size() > 0) {
      n = o.x_hat.rows();
      d = o.x_hat.cols();
      break;
    }
  }
  out << "replicate,converged,iterations,error_norm,sigma2_hat,ellipsoid,statistic,covers";
  for (Index c = 0; c < d; ++c)
    for (Index r = 0; r < n; ++r) out << ",x_hat_" << r + 1 << "_" << c + 1;
  out << '\n';
  for (const auto& o : outcomes) {
    out << o.replicate << ',' << (o.converged ? 1 : 0) << ',' << o.iterations << ','
        << fmt17(o.error_norm) << ',' << fmt17(o.sigma2_hat) << ','
        << (o.ellipsoid_available ? 1 : 0) << ','
        << (o.ellipsoid_available ? fmt17(o.statistic) : std::string("")) << ','
        << (o.covers ? 1 : 0);
    for (Index c = 0; c < d; ++c)
      for (Index r = 0; r < n; ++r)
        out << ',' << (o.x_hat.size() > 0 ? fmt17(o.x_hat(r, c)) : std::string(""));
    out << '\n';
  }
}

}  // namespace ewtls::io
