//
// Copyright 2026 The dp_linreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: fit, bench, synth-bench, inspect-calibration.
//
// stdout carries JSON or CSV only; diagnostics go to stderr. Exit codes:
// 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dp_linreg/dp_linreg.hpp"

namespace {

using nlohmann::ordered_json;
using namespace dp_linreg;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown for flag combinations CLI11 cannot validate on its own.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int resolve_jobs(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw UsageError("--jobs must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("DP_LINREG_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    warn("ignoring DP_LINREG_JOBS='" + std::string(env) + "'");
  }
  return 1;
}

std::vector<EstimatorConfig> parse_estimators(const std::vector<std::string>& items) {
  std::vector<EstimatorConfig> out;
  for (const auto& s : items) {
    try {
      out.push_back(parse_estimator(s));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

void print_summary(const std::vector<ResultRow>& rows) {
  std::fprintf(stderr, "%-28s %-20s %-10s %-20s %-14s %-14s %s\n", "dataset", "estimator",
               "eps", "metric", "mean", "std", "degenerate");
  for (const auto& r : rows) {
    std::fprintf(stderr, "%-28s %-20s %-10.4g %-20s %-14.6g %-14.6g %d/%d\n",
                 r.dataset.c_str(), r.estimator.c_str(), r.eps, r.metric.c_str(), r.mean,
                 r.std, r.degenerate_count, r.trials);
  }
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& out_path,
                  const std::string& jsonl_path, bool quiet) {
  std::ostringstream csv;
  write_results_csv(csv, rows);
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out_path, csv.str());
  }
  if (!jsonl_path.empty()) {
    std::ostringstream js;
    write_results_jsonl(js, rows);
    write_text_file(jsonl_path, js.str());
  }
  if (!quiet) print_summary(rows);
}

ordered_json fit_to_json(const FitResult& r, Eigen::Index n, Eigen::Index d) {
  ordered_json j;
  j["method"] = method_name(r.method);
  j["tag"] = r.tag;
  j["n"] = n;
  j["d"] = d;
  j["theta"] = std::vector<double>(r.theta.data(), r.theta.data() + r.theta.size());
  j["lambda"] = r.lambda;
  if (r.gamma) j["gamma"] = *r.gamma;
  if (r.tilde_lambda_min) j["tilde_lambda_min"] = *r.tilde_lambda_min;
  if (r.lipschitz_released) j["lipschitz_released"] = *r.lipschitz_released;
  if (r.budget_spent) {
    j["budget_spent"] = {{"epsilon", r.budget_spent->epsilon()},
                         {"delta", r.budget_spent->delta()}};
  } else {
    j["budget_spent"] = nullptr;
  }
  ordered_json ledger = ordered_json::array();
  for (const auto& e : r.ledger.entries()) {
    ledger.push_back({{"release", e.name}, {"epsilon", e.epsilon}, {"delta", e.delta}});
  }
  j["ledger"] = ledger;
  j["degenerate"] = r.degenerate;
  if (r.rng_seed) {
    j["rng"] = {{"seed", *r.rng_seed},
                {"stream", *r.rng_stream},
                {"fingerprint", *r.rng_fingerprint}};
  }
  ordered_json diag = ordered_json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = v;
  j["diagnostics"] = diag;
  return j;
}

// --- fit --------------------------------------------------------------------------

struct FitFlags {
  std::string data;
  std::optional<std::string> target_col;
  std::string method;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  double varrho = kDefaultVarrho;
  bool raw = false;
  double bound_x = 1.0;
  std::optional<double> bound_y;
};

int cmd_fit(const FitFlags& f) {
  EstimatorConfig cfg;
  try {
    cfg = parse_estimator(f.method);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.is_private()) {
    if (!f.eps) throw UsageError("--eps is required for private methods");
    if (!f.seed) throw UsageError("--seed is required for private methods");
  }
  const RawTable table = read_csv(f.data, f.target_col);
  std::optional<Dataset> data;
  if (f.raw) {
    const double by = f.bound_y.value_or(table.y.cwiseAbs().maxCoeff());
    data.emplace(table.x, table.y, f.bound_x, by);
  } else {
    data.emplace(preprocess(table.x, table.y));
  }
  const double delta =
      f.delta.value_or(DeltaRule{}.delta_for(static_cast<double>(data->n())));
  const double eps = f.eps.value_or(1.0);
  RngStream rng(f.seed.value_or(0), 0);
  const FitResult r = run_estimator(cfg, *data, eps, delta, f.varrho, rng);
  std::cout << fit_to_json(r, data->n(), data->d()).dump(2) << '\n';
  return kExitOk;
}

// --- bench ------------------------------------------------------------------------

struct BenchFlags {
  std::string spec_path;
  std::string data;
  std::optional<std::string> target_col;
  std::vector<std::string> estimators;
  std::vector<double> eps;
  std::string delta_rule;
  std::optional<int> folds;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> varrho;
  std::string out;
  std::string jsonl;
  std::optional<int> jobs;
  bool quiet = false;
};

int cmd_bench(const BenchFlags& f) {
  ExperimentSpec spec;
  if (!f.spec_path.empty()) spec = read_experiment_spec(f.spec_path);
  // Flags override spec-file values.
  if (!f.data.empty()) spec.dataset = f.data;
  if (f.target_col) spec.target_col = f.target_col;
  if (!f.estimators.empty()) spec.estimators = parse_estimators(f.estimators);
  if (!f.eps.empty()) spec.eps = f.eps;
  try {
    if (!f.delta_rule.empty()) spec.delta_rule = DeltaRule::parse(f.delta_rule);
    if (f.folds) spec.folds = *f.folds;
    if (f.trials) spec.trials = *f.trials;
    if (f.seed) spec.seed = *f.seed;
    if (f.varrho) spec.varrho = *f.varrho;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (spec.dataset.empty()) throw UsageError("no dataset: pass --data or --spec");
  const auto rows = run_experiment(spec, resolve_jobs(f.jobs));
  emit_results(rows, f.out, f.jsonl, f.quiet);
  return kExitOk;
}

// --- synth-bench ------------------------------------------------------------------

struct SynthFlags {
  std::string n_grid = "1e2:1e6:log";
  int d = 10;
  double sigma = 1.0;
  std::vector<double> eps{0.1, 1.0};
  std::vector<std::string> estimators{"ols", "adassp", "adaops", "ssp", "ops", "objpert"};
  std::string delta_rule = "inv_n2";
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
  double varrho = kDefaultVarrho;
  std::string out;
  std::string jsonl;
  std::optional<int> jobs;
  bool quiet = false;
};

int cmd_synth_bench(const SynthFlags& f) {
  SyntheticSweepSpec spec;
  try {
    spec.n_grid = parse_n_grid(f.n_grid);
    spec.delta_rule = DeltaRule::parse(f.delta_rule);
    spec.d = f.d;
    spec.sigma = f.sigma;
    spec.eps = f.eps;
    spec.trials = f.trials;
    spec.seed = f.seed;
    spec.varrho = f.varrho;
    spec.estimators = parse_estimators(f.estimators);
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = run_synthetic_sweep(spec, resolve_jobs(f.jobs));
  emit_results(rows, f.out, f.jsonl, f.quiet);
  return kExitOk;
}

// --- inspect-calibration ----------------------------------------------------------

struct InspectFlags {
  std::string method = "adaops";
  double eps = 1.0;
  double delta = 1e-6;
  int d = 10;
  double n = 1000;
  double bound_x = 1.0;
  double bound_y = 1.0;
  double tilde_lambda_min = 0.0;
  std::optional<double> lipschitz;
  double varrho = kDefaultVarrho;
  std::string form = "product";
};

int cmd_inspect(const InspectFlags& f) {
  EstimatorConfig cfg;
  try {
    cfg = parse_estimator(f.method);
    if (!(f.eps > 0.0) || !(f.delta > 0.0 && f.delta < 1.0) || f.d < 1 || !(f.n >= 1.0) ||
        !(f.bound_x > 0.0) || !(f.bound_y > 0.0) || !(f.tilde_lambda_min >= 0.0)) {
      throw std::invalid_argument("eps, delta, d, n and bounds must be in range");
    }
    if (f.form != "product" && f.form != "sum") {
      throw std::invalid_argument("--form must be product or sum");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ordered_json j;
  j["method"] = cfg.id;
  j["eps"] = f.eps;
  j["delta"] = f.delta;
  j["d"] = f.d;
  const double l6 = log6_over(f.delta);
  switch (cfg.kind) {
    case EstimatorKind::kAdaOps: {
      const EpsTildeForm form = f.form == "sum" ? EpsTildeForm::kSum : EpsTildeForm::kProduct;
      const AdaOpsBudget b = adaops_budget(f.eps, f.delta, form);
      const double c1 = c_constants(b.eps_bar, l6, f.varrho, f.d).c1;
      const double c2 = l6 / (f.eps / 4.0);
      const double t_min = adaops_t_min(f.tilde_lambda_min, f.bound_x, f.eps, l6);
      const double lambda = adaops_choose_lambda(f.tilde_lambda_min, f.bound_x, c1, c2, t_min);
      j["eps_bar"] = b.eps_bar;
      j["eps_tilde"] = b.eps_tilde;
      j["eps_tilde_form"] = f.form;
      j["c1"] = c1;
      j["c2"] = c2;
      j["tilde_lambda_min"] = f.tilde_lambda_min;
      j["t_min"] = t_min;
      j["lambda"] = lambda;
      if (f.lipschitz) {
        j["lipschitz"] = *f.lipschitz;
        j["gamma"] = (f.tilde_lambda_min + lambda) * b.eps_tilde * b.eps_tilde /
                     (l6 * *f.lipschitz * *f.lipschitz);
      }
      j["epsilon_threshold"] = adaops_epsilon_threshold(f.delta);
      break;
    }
    case EstimatorKind::kAdaSsp: {
      const double eps3 = f.eps / 3.0;
      j["tilde_lambda_min"] = f.tilde_lambda_min;
      j["lambda"] = adassp_lambda(f.tilde_lambda_min, f.bound_x, f.d, l6, f.varrho, eps3);
      j["matrix_noise_scale"] = std::sqrt(l6) * f.bound_x * f.bound_x / eps3;
      j["vector_noise_scale"] = std::sqrt(l6) * f.bound_x * f.bound_y / eps3;
      break;
    }
    case EstimatorKind::kOps: {
      const OpsCalibration cal =
          ops_calibrate(cfg.ops, f.eps, f.delta, f.n, f.bound_x, f.bound_y, f.d, f.varrho);
      if (!(cal.pdp_epsilon <= f.eps + 1e-9)) {
        std::cerr << "error: calibrated pDP epsilon " << cal.pdp_epsilon << " exceeds eps\n";
        return kExitRuntime;
      }
      j["variant"] = std::string(to_string(cfg.ops.variant));
      j["n"] = f.n;
      if (cfg.ops.variant == OpsVariant::kBalanced) {
        j["B"] = cfg.ops.b;
        j["c1"] = ops_c1(f.eps, f.delta, f.varrho, f.d);
      }
      if (cfg.ops.variant == OpsVariant::kConservative) {
        j["c1"] = ops_c1(f.eps, f.delta, f.varrho, f.d);
      }
      j["lambda"] = cal.lambda;
      j["gamma"] = cal.gamma;
      j["lipschitz"] = cal.lipschitz;
      j["pdp_epsilon"] = cal.pdp_epsilon;
      break;
    }
    case EstimatorKind::kObjPert: {
      const ObjPertConstants k =
          objpert_constants(PrivacyBudget(f.eps, f.delta), f.bound_x, f.bound_y,
                            cfg.domain_bound);
      j["lambda"] = k.lambda;
      j["noise_scale"] = k.noise_scale;
      j["domain_bound"] = cfg.domain_bound;
      break;
    }
    case EstimatorKind::kSsp: {
      const ReleaseParams p = ssp_release_part(PrivacyBudget(f.eps, f.delta));
      j["matrix_noise_scale"] = suff_stats_matrix_scale(f.bound_x, p);
      j["vector_noise_scale"] = suff_stats_vector_scale(f.bound_x, f.bound_y, p);
      break;
    }
    default:
      throw UsageError("inspect-calibration needs a private method");
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private linear regression"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  FitFlags fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one estimator on a CSV file; prints JSON");
  fit_cmd->add_option("--data", fit.data, "CSV file (header row, last column target)")
      ->required();
  fit_cmd->add_option("--target-col", fit.target_col, "Name of the target column");
  fit_cmd->add_option("--method", fit.method, "Estimator, e.g. adassp or ops-diffuse")
      ->required();
  fit_cmd->add_option("--eps", fit.eps, "Privacy epsilon");
  fit_cmd->add_option("--delta", fit.delta, "Privacy delta (default min(1e-6, 1/n^2))");
  fit_cmd->add_option("--seed", fit.seed, "Random seed (required for private methods)");
  fit_cmd->add_option("--varrho", fit.varrho, "Utility failure probability");
  fit_cmd->add_flag("--raw", fit.raw, "Skip preprocessing; use --bound-x/--bound-y");
  fit_cmd->add_option("--bound-x", fit.bound_x, "Row-norm bound with --raw");
  fit_cmd->add_option("--bound-y", fit.bound_y, "Response bound with --raw");

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Cross-validated benchmark on a CSV file");
  bench_cmd->add_option("--spec", bench.spec_path, "Experiment spec file");
  bench_cmd->add_option("--data", bench.data, "CSV file (overrides the spec)");
  bench_cmd->add_option("--target-col", bench.target_col, "Name of the target column");
  bench_cmd->add_option("--estimators", bench.estimators, "Comma separated estimators")
      ->delimiter(',');
  bench_cmd->add_option("--eps", bench.eps, "Comma separated epsilon grid")->delimiter(',');
  bench_cmd->add_option("--delta-rule", bench.delta_rule,
                        "min_1e-6_inv_n2 | inv_n2 | fixed:<value>");
  bench_cmd->add_option("--folds", bench.folds, "Cross-validation folds");
  bench_cmd->add_option("--trials", bench.trials, "Repetitions of the fold split");
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--varrho", bench.varrho, "Utility failure probability");
  bench_cmd->add_option("--out", bench.out, "Results CSV path (default stdout)");
  bench_cmd->add_option("--jsonl", bench.jsonl, "Line-delimited JSON mirror path");
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads (env DP_LINREG_JOBS)");
  bench_cmd->add_flag("--quiet", bench.quiet, "No summary table on stderr");

  SynthFlags synth;
  auto* synth_cmd =
      app.add_subcommand("synth-bench", "Convergence sweep on linear Gaussian data");
  synth_cmd->add_option("--n-grid", synth.n_grid, "lo:hi:log[:count] or a comma list")->capture_default_str();
  synth_cmd->add_option("--d", synth.d, "Dimension")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma, "Noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--eps", synth.eps, "Comma separated epsilon grid")->capture_default_str()
      ->delimiter(',');
  synth_cmd->add_option("--estimators", synth.estimators, "Comma separated estimators")->capture_default_str()
      ->delimiter(',');
  synth_cmd->add_option("--delta-rule", synth.delta_rule, "Delta rule")->capture_default_str();
  synth_cmd->add_option("--trials", synth.trials, "Data sets per n")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
  synth_cmd->add_option("--varrho", synth.varrho, "Utility failure probability")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Results CSV path (default stdout)");
  synth_cmd->add_option("--jsonl", synth.jsonl, "Line-delimited JSON mirror path");
  synth_cmd->add_option("--jobs", synth.jobs, "Worker threads (env DP_LINREG_JOBS)");
  synth_cmd->add_flag("--quiet", synth.quiet, "No summary table on stderr");

  InspectFlags inspect;
  auto* inspect_cmd = app.add_subcommand("inspect-calibration",
                                         "Print the calibration chain of a method as JSON");
  inspect_cmd->add_option("--method", inspect.method, "adaops, adassp, ssp, objpert, ops-*")->capture_default_str();
  inspect_cmd->add_option("--eps", inspect.eps, "Privacy epsilon")->capture_default_str();
  inspect_cmd->add_option("--delta", inspect.delta, "Privacy delta")->capture_default_str();
  inspect_cmd->add_option("--d", inspect.d, "Dimension")->capture_default_str();
  inspect_cmd->add_option("--n", inspect.n, "Number of rows (OPS)")->capture_default_str();
  inspect_cmd->add_option("--bound-x", inspect.bound_x, "Row-norm bound")->capture_default_str();
  inspect_cmd->add_option("--bound-y", inspect.bound_y, "Response bound")->capture_default_str();
  inspect_cmd->add_option("--tilde-lambda-min", inspect.tilde_lambda_min,
                          "Released smallest eigenvalue")->capture_default_str();
  inspect_cmd->add_option("--lipschitz", inspect.lipschitz,
                          "Released Lipschitz bound (AdaOPS gamma)");
  inspect_cmd->add_option("--varrho", inspect.varrho, "Utility failure probability")->capture_default_str();
  inspect_cmd->add_option("--form", inspect.form, "eps_tilde bracket: product or sum")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*bench_cmd) return cmd_bench(bench);
    if (*synth_cmd) return cmd_synth_bench(synth);
    if (*inspect_cmd) return cmd_inspect(inspect);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
