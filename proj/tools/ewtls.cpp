// ewtls: estimate / simulate / validate front end.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure (non-convergence,
// failed validation, invalid Monte Carlo summary).

#include "ewtls/errors.hpp"
#include "ewtls/inference.hpp"
#include "ewtls/io.hpp"
#include "ewtls/simulation.hpp"
#include "ewtls/solver.hpp"
#include "ewtls/validation.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

using ewtls::io::json;

int default_threads() {
  if (const char* env = std::getenv("EWTLS_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 0) return t;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid EWTLS_THREADS='" << env << "'\n";
  }
  return 0;
}

ewtls::Vector parse_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
    if (used == 0 || used != field.size())
      throw ewtls::InputError(flag + ": cannot parse '" + field + "' as a number");
    values.push_back(v);
  }
  if (values.empty()) throw ewtls::InputError(flag + ": empty vector");
  return Eigen::Map<ewtls::Vector>(values.data(), static_cast<ewtls::Index>(values.size()));
}

void emit(const json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    ewtls::io::write_json(out, doc);
  }
}

ewtls::InitKind parse_init(const std::string& s) {
  return s == "tls" ? ewtls::InitKind::Tls : ewtls::InitKind::Ols;
}

struct EstimateArgs {
  std::string data, cov, out, u, init = "ols", method = "ewtls";
  bool header = false;
  double level = 0.95;
  double grad_tol = 1e-9;
  int max_iter = 500;
  int threads = 0;
  long d = 1;
};

int cmd_estimate(const EstimateArgs& a) {
  const ewtls::Matrix c = ewtls::io::read_csv(a.data, a.header);
  if (a.d < 1 || a.d >= c.cols())
    throw ewtls::InputError("--d must be in [1, columns - 1] (" + std::to_string(c.cols()) +
                            " columns in " + a.data + ")");
  const ewtls::Index n = c.cols() - a.d;
  ewtls::ProblemData data(c, n);
  const ewtls::Dimensions dims = data.dims();

  ewtls::io::EstimateReport report;
  report.method = a.method;
  report.dims = dims;

  std::optional<ewtls::ObjectiveContext> ctx;
  if (!a.cov.empty()) {
    ctx.emplace(data, ewtls::io::read_cov(a.cov, dims), a.threads);
  } else if (a.method == "ewtls") {
    throw ewtls::InputError("--cov is required for --method ewtls");
  }

  if (a.method == "tls") {
    report.estimate.x_hat = ewtls::tls_estimate(data);
    report.estimate.converged = true;
    report.estimate.init_used = ewtls::InitKind::Tls;
    report.estimate.message = "closed-form SVD solution";
    if (ctx) report.estimate.q_min = ewtls::objective_value(*ctx, report.estimate.x_hat);
  } else {
    ewtls::SolverOptions opts;
    opts.grad_tol = a.grad_tol;
    opts.max_iter = a.max_iter;
    opts.init = parse_init(a.init);
    opts.validate();
    report.estimate = ewtls::ewtls_solve(*ctx, opts);
  }

  if (ctx && report.estimate.converged) {
    try {
      report.nuisance = ewtls::estimate_nuisance(*ctx, report.estimate.x_hat);
      report.va_indefinite_warning = !report.nuisance->va_positive_definite;
      if (report.va_indefinite_warning) report.warnings.push_back("VA_hat is not positive definite");
      if (!a.u.empty()) {
        const ewtls::Vector u = parse_vector(a.u, "--u");
        if (u.size() != dims.d)
          throw ewtls::InputError("--u has " + std::to_string(u.size()) + " entries, expected d = " +
                                  std::to_string(dims.d));
        report.covariance =
            ewtls::sandwich_su(*ctx, report.estimate.x_hat, report.nuisance->va_hat, u);
        report.ellipsoid =
            ewtls::confidence_ellipsoid(report.estimate, *report.covariance, dims.m, a.level);
      }
    } catch (const ewtls::InferenceError& e) {
      report.warnings.push_back(std::string("inference unavailable: ") + e.what());
    }
  } else if (!a.u.empty() && !ctx) {
    report.warnings.push_back("--u ignored without --cov");
  }

  emit(ewtls::io::estimate_to_json(report), a.out);
  if (!report.estimate.converged) {
    std::cerr << "error: solver did not converge: " << report.estimate.message << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario, out, replicates_csv, u;
  int replicates = 200;
  long m = 0;
  std::optional<std::uint64_t> seed;
  double level = 0.95;
  int threads = 0;
  bool clt = false;
};

int cmd_simulate(const SimulateArgs& a) {
  ewtls::ScenarioSpec spec =
      a.scenario.empty() ? ewtls::default_scenario() : ewtls::io::read_scenario(a.scenario);
  if (a.m > 0) spec.dims.m = a.m;
  if (a.seed) spec.seed = *a.seed;
  if (a.replicates < 1) throw ewtls::InputError("--replicates must be >= 1");
  spec.validate();

  ewtls::McOptions opts;
  opts.level = a.level;
  opts.threads = a.threads;
  if (!a.u.empty()) opts.u = parse_vector(a.u, "--u");

  const ewtls::McResult res = ewtls::run_monte_carlo(spec, a.replicates, opts);
  json doc;
  doc["scenario"] = ewtls::io::scenario_to_json(spec);
  doc["summary"] = ewtls::io::summary_to_json(res.summary);
  doc["conditions"] = ewtls::io::conditions_to_json(ewtls::check_conditions(spec));
  if (a.clt) doc["clt"] = ewtls::io::clt_to_json(ewtls::clt_diagnostics(spec, a.replicates, a.threads));
  emit(doc, a.out);

  if (!a.replicates_csv.empty()) {
    std::ofstream f(a.replicates_csv);
    if (!f) throw ewtls::InputError("cannot open '" + a.replicates_csv + "' for writing");
    ewtls::io::write_replicates_csv(f, res.outcomes);
  }
  if (!res.summary.valid) {
    std::cerr << "error: " << res.summary.nonconverged_fraction * 100.0
              << "% of replicates did not converge\n";
    return kExitNumerical;
  }
  return kExitOk;
}

struct ValidateArgs {
  std::vector<std::string> suites;
  bool quick = false;
  std::string out;
  std::uint64_t seed = 12345;
  int threads = 0;
};

int cmd_validate(const ValidateArgs& a) {
  ewtls::ValidationOptions opts;
  for (const auto& s : a.suites) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) opts.suites.push_back(part);
  }
  opts.quick = a.quick;
  opts.seed = a.seed;
  opts.threads = a.threads;
  const ewtls::ValidationReport report = ewtls::run_validation(opts);
  for (const auto& suite : report.suites)
    for (const auto& c : suite.checks)
      std::cerr << (c.passed ? "PASS " : "FAIL ") << suite.name << ": " << c.name << " = " << c.value
                << " (threshold " << c.threshold << ")\n";
  emit(report.to_json(), a.out);
  return report.passed() ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Element-wise weighted total least squares: estimation, simulation, validation"};
  app.require_subcommand(1);
  const int threads = default_threads();

  EstimateArgs est;
  est.threads = threads;
  auto* e = app.add_subcommand("estimate", "Estimate X from a data CSV and an error covariance file");
  e->add_option("--data", est.data, "CSV with columns A then B")->required()->check(CLI::ExistingFile);
  e->add_option("--cov", est.cov, "Covariance JSON (J, sigma_common | sigma_per_row)")
      ->check(CLI::ExistingFile);
  e->add_flag("--header", est.header, "First CSV line is a header");
  e->add_option("--d", est.d, "Number of output columns (trailing columns of the CSV)")
      ->capture_default_str();
  e->add_option("--out", est.out, "Output JSON path (stdout when omitted)");
  e->add_option("--u", est.u, "Direction vector 'v1,v2,...' for S_u and the ellipsoid");
  e->add_option("--level", est.level, "Ellipsoid confidence level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  e->add_option("--init", est.init, "Starting point")
      ->check(CLI::IsMember({"ols", "tls"}))
      ->capture_default_str();
  e->add_option("--method", est.method, "Estimator")
      ->check(CLI::IsMember({"ewtls", "tls"}))
      ->capture_default_str();
  e->add_option("--grad-tol", est.grad_tol, "Gradient tolerance (on ||grad Q||_F / m)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  e->add_option("--max-iter", est.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--threads", est.threads, "Kernel threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

  SimulateArgs sim;
  sim.threads = threads;
  std::uint64_t sim_seed = 0;
  auto* s = app.add_subcommand("simulate", "Run a Monte Carlo study of a scenario");
  s->add_option("--scenario", sim.scenario, "Scenario JSON (default scenario when omitted)")
      ->check(CLI::ExistingFile);
  s->add_option("--out", sim.out, "Summary JSON path (stdout when omitted)");
  s->add_option("--replicates-csv", sim.replicates_csv, "Per-replicate CSV path");
  s->add_option("--replicates", sim.replicates, "Replicate count")->capture_default_str();
  s->add_option("--m", sim.m, "Override the number of rows")->check(CLI::PositiveNumber);
  auto* seed_opt = s->add_option("--seed", sim_seed, "Override the scenario seed");
  s->add_option("--u", sim.u, "Direction vector 'v1,v2,...' (default e1)");
  s->add_option("--level", sim.level, "Ellipsoid confidence level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  s->add_option("--threads", sim.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  s->add_flag("--clt", sim.clt, "Add CLT diagnostics of the W components");

  ValidateArgs val;
  val.threads = threads;
  auto* v = app.add_subcommand("validate", "Run the built-in property suites");
  v->add_option("--suite", val.suites, "Suites to run: gradient, oracle, unbiased, jacobian (default all)");
  v->add_flag("--quick", val.quick, "Cap Monte Carlo at 1e4 draws and widen tolerances 2x");
  v->add_option("--out", val.out, "Report JSON path (stdout when omitted)");
  v->add_option("--seed", val.seed, "Seed")->capture_default_str();
  v->add_option("--threads", val.threads, "Kernel threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (e->parsed()) return cmd_estimate(est);
    if (s->parsed()) {
      if (seed_opt->count() > 0) sim.seed = sim_seed;
      return cmd_simulate(sim);
    }
    return cmd_validate(val);
  } catch (const ewtls::InputError& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kExitInput;
  } catch (const ewtls::Error& err) {
    std::cerr << "numerical error: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "input error: " << err.what() << '\n';
    return kExitInput;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInput;
  }
}
