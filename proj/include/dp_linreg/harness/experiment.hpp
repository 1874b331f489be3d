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

// Benchmark orchestration: estimator registry, delta rules, cross-validation
// over a data file and convergence sweeps over synthetic data.
//
// Every cell (trial, fold, estimator, epsilon) draws from its own RngStream
// keyed by (master seed, cell index), so results do not depend on the number
// of worker threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dp_linreg/calibration.hpp"
#include "dp_linreg/estimators.hpp"
#include "dp_linreg/harness/io.hpp"
#include "dp_linreg/harness/metrics.hpp"
#include "dp_linreg/harness/parallel.hpp"
#include "dp_linreg/harness/preprocess.hpp"
#include "dp_linreg/harness/synthetic.hpp"
#include "dp_linreg/random.hpp"

namespace dp_linreg {

// --- estimator registry ------------------------------------------------------

enum class EstimatorKind { kTrivial, kOls, kObjPert, kOps, kSsp, kAdaOps, kAdaSsp };

struct EstimatorConfig {
  std::string id;  // as written by the user, used in result rows
  EstimatorKind kind = EstimatorKind::kTrivial;
  OpsStrategy ops;                      // kOps
  double domain_bound = 1.0;            // kObjPert: radius of the parameter ball
  double ols_lambda = 0.0;              // kOls
  EpsTildeForm eps_tilde_form = EpsTildeForm::kProduct;  // kAdaOps

  bool is_private() const {
    return kind != EstimatorKind::kTrivial && kind != EstimatorKind::kOls;
  }
};

namespace internal {

inline double parse_option_value(std::string_view est, std::string_view key,
                                 const std::string& value) {
  const auto v = parse_double(value);
  if (!v) {
    throw std::invalid_argument("estimator '" + std::string(est) + "': option '" +
                                std::string(key) + "' needs a number");
  }
  return *v;
}

}  // namespace internal

// Grammar: name[:key=value[:key=value...]]. Names: trivial, ols, objpert,
// ops (balanced), ops-diffuse, ops-concentrated, ops-balanced,
// ops-conservative, ssp, adaops, adassp. Options: ols lambda=, objpert
// theta=, ops-balanced B=, adaops form=product|sum.
inline EstimatorConfig parse_estimator(std::string_view text) {
  const std::string spec = internal::trim(text);
  const std::vector<std::string> parts = internal::split(spec, ':');
  const std::string& name = parts.front();
  EstimatorConfig c;
  c.id = spec;
  if (name == "trivial") {
    c.kind = EstimatorKind::kTrivial;
  } else if (name == "ols") {
    c.kind = EstimatorKind::kOls;
  } else if (name == "objpert") {
    c.kind = EstimatorKind::kObjPert;
  } else if (name == "ssp") {
    c.kind = EstimatorKind::kSsp;
  } else if (name == "adaops") {
    c.kind = EstimatorKind::kAdaOps;
  } else if (name == "adassp") {
    c.kind = EstimatorKind::kAdaSsp;
  } else if (name == "ops") {
    c.kind = EstimatorKind::kOps;
    c.ops.variant = OpsVariant::kBalanced;
  } else if (name.rfind("ops-", 0) == 0) {
    const auto v = parse_ops_variant(std::string_view(name).substr(4));
    if (!v) throw std::invalid_argument("unknown OPS variant in '" + spec + "'");
    c.kind = EstimatorKind::kOps;
    c.ops.variant = *v;
  } else {
    throw std::invalid_argument("unknown estimator '" + name + "'");
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("estimator option '" + parts[i] + "' needs key=value");
    }
    const std::string key = internal::trim(std::string_view(parts[i]).substr(0, eq));
    const std::string value = internal::trim(std::string_view(parts[i]).substr(eq + 1));
    if (c.kind == EstimatorKind::kOls && key == "lambda") {
      c.ols_lambda = internal::parse_option_value(spec, key, value);
      if (!(c.ols_lambda >= 0.0)) throw std::invalid_argument("ols lambda must be >= 0");
    } else if (c.kind == EstimatorKind::kObjPert && key == "theta") {
      c.domain_bound = internal::parse_option_value(spec, key, value);
      if (!(c.domain_bound > 0.0)) throw std::invalid_argument("objpert theta must be > 0");
    } else if (c.kind == EstimatorKind::kOps && c.ops.variant == OpsVariant::kBalanced &&
               key == "B") {
      c.ops.b = internal::parse_option_value(spec, key, value);
      c.ops.validate();
    } else if (c.kind == EstimatorKind::kAdaOps && key == "form") {
      if (value == "product") {
        c.eps_tilde_form = EpsTildeForm::kProduct;
      } else if (value == "sum") {
        c.eps_tilde_form = EpsTildeForm::kSum;
      } else {
        throw std::invalid_argument("adaops form must be product or sum");
      }
    } else {
      throw std::invalid_argument("estimator '" + name + "' has no option '" + key + "'");
    }
  }
  return c;
}

inline FitResult run_estimator(const EstimatorConfig& c, const Dataset& data, double eps,
                               double delta, double varrho, RngStream& rng) {
  switch (c.kind) {
    case EstimatorKind::kTrivial:
      return trivial_fit(data);
    case EstimatorKind::kOls:
      return ols_fit(data, c.ols_lambda);
    case EstimatorKind::kObjPert:
      return objpert_fit(data, PrivacyBudget(eps, delta), c.domain_bound, rng);
    case EstimatorKind::kOps:
      return ops_fit(data, PrivacyBudget(eps, delta), c.ops, rng, varrho);
    case EstimatorKind::kSsp:
      return ssp_fit(data, PrivacyBudget(eps, delta), rng);
    case EstimatorKind::kAdaOps: {
      AdaOpsOptions opt;
      opt.varrho = varrho;
      opt.eps_tilde_form = c.eps_tilde_form;
      return adaops_fit(data, PrivacyBudget(eps, delta), rng, opt);
    }
    case EstimatorKind::kAdaSsp:
      return adassp_fit(data, PrivacyBudget(eps, delta), varrho, rng);
  }
  throw std::logic_error("run_estimator: unhandled estimator kind");
}

// --- delta rule ----------------------------------------------------------------

struct DeltaRule {
  enum class Kind { kMin1e6InvN2, kInvN2, kFixed };
  Kind kind = Kind::kMin1e6InvN2;
  double value = 0.0;  // kFixed

  double delta_for(double n) const {
    switch (kind) {
      case Kind::kMin1e6InvN2: return std::min(1e-6, 1.0 / (n * n));
      case Kind::kInvN2: return 1.0 / (n * n);
      case Kind::kFixed: return value;
    }
    return value;
  }

  // min_1e-6_inv_n2 | inv_n2 | fixed:<value>
  static DeltaRule parse(std::string_view text) {
    const std::string s = internal::trim(text);
    DeltaRule r;
    if (s == "min_1e-6_inv_n2") {
      r.kind = Kind::kMin1e6InvN2;
    } else if (s == "inv_n2") {
      r.kind = Kind::kInvN2;
    } else if (s.rfind("fixed:", 0) == 0) {
      const auto v = internal::parse_double(s.substr(6));
      if (!v || !(*v > 0.0 && *v < 1.0)) {
        throw std::invalid_argument("delta_rule fixed value must lie in (0, 1)");
      }
      r.kind = Kind::kFixed;
      r.value = *v;
    } else {
      throw std::invalid_argument("unknown delta_rule '" + s + "'");
    }
    return r;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::kMin1e6InvN2: return "min_1e-6_inv_n2";
      case Kind::kInvN2: return "inv_n2";
      case Kind::kFixed: return "fixed:" + format_g9(value);
    }
    return "";
  }
};

// --- experiment specification --------------------------------------------------

inline constexpr int kDefaultFolds = 10;
inline constexpr int kDefaultTrials = 10;

struct ExperimentSpec {
  std::string dataset;  // CSV path
  std::optional<std::string> target_col;
  std::vector<EstimatorConfig> estimators;
  std::vector<double> eps;
  DeltaRule delta_rule;
  int folds = kDefaultFolds;
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
  double varrho = kDefaultVarrho;

  void validate() const {
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (double e : eps) {
      if (!(e > 0.0) || !std::isfinite(e)) {
        throw std::invalid_argument("every eps must be finite and > 0");
      }
    }
    if (!(varrho > 0.0 && varrho < 1.0)) {
      throw std::invalid_argument("varrho must lie in (0, 1)");
    }
  }
};

namespace internal {

inline std::vector<std::string> parse_list(const std::string& value) {
  std::string v = trim(value);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (auto& item : split(v, ',')) {
    if (item.empty()) throw std::invalid_argument("empty list item");
    out.push_back(item);
  }
  return out;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || s.front() == '-') {
    throw std::invalid_argument(key + " must be a non-negative integer");
  }
  return v;
}

inline int parse_int(const std::string& s, const std::string& key) {
  const std::uint64_t v = parse_u64(s, key);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw std::invalid_argument(key + " is too large");
  }
  return static_cast<int>(v);
}

}  // namespace internal

// Line-oriented `key = value` format. `#` starts a comment; list values are
// comma separated, optionally wrapped in brackets. Keys: dataset, target_col,
// estimators, eps, delta_rule, folds, trials, seed, varrho.
inline ExperimentSpec parse_experiment_spec(std::istream& in, const std::string& source) {
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (internal::trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw DataError(where + ": expected key = value");
    const std::string key = internal::trim(std::string_view(line).substr(0, eq));
    const std::string value = internal::trim(std::string_view(line).substr(eq + 1));
    try {
      if (key == "dataset") {
        spec.dataset = value;
      } else if (key == "target_col") {
        spec.target_col = value;
      } else if (key == "estimators") {
        spec.estimators.clear();
        for (const auto& item : internal::parse_list(value)) {
          spec.estimators.push_back(parse_estimator(item));
        }
      } else if (key == "eps") {
        spec.eps.clear();
        for (const auto& item : internal::parse_list(value)) {
          const auto v = internal::parse_double(item);
          if (!v) throw std::invalid_argument("eps item '" + item + "' is not a number");
          spec.eps.push_back(*v);
        }
      } else if (key == "delta_rule") {
        spec.delta_rule = DeltaRule::parse(value);
      } else if (key == "folds") {
        spec.folds = internal::parse_int(value, key);
      } else if (key == "trials") {
        spec.trials = internal::parse_int(value, key);
      } else if (key == "seed") {
        spec.seed = internal::parse_u64(value, key);
      } else if (key == "varrho") {
        const auto v = internal::parse_double(value);
        if (!v) throw std::invalid_argument("varrho must be a number");
        spec.varrho = *v;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
  return spec;
}

inline ExperimentSpec read_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_experiment_spec(in, path);
}

// --- aggregation -----------------------------------------------------------------

// One (estimator, eps, metric) slot holding a value per replicate. Failed fits
// leave NaN and are excluded from the mean.
struct CellSamples {
  std::vector<double> values;
  std::vector<char> degenerate;
};

inline void summarize(const CellSamples& s, ResultRow& row) {
  double sum = 0.0;
  int count = 0;
  for (double v : s.values) {
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  }
  row.degenerate_count = static_cast<int>(
      std::count(s.degenerate.begin(), s.degenerate.end(), static_cast<char>(1)));
  if (count == 0) {
    row.mean = std::numeric_limits<double>::quiet_NaN();
    row.std = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  row.mean = sum / count;
  double ss = 0.0;
  for (double v : s.values) {
    if (std::isfinite(v)) ss += (v - row.mean) * (v - row.mean);
  }
  row.std = count > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
}

namespace internal {

// Stream index of one fit; disjoint from the streams used for data splits and
// synthetic draws (which take the top bit).
inline std::uint64_t fit_stream(std::uint64_t replicate, std::size_t estimator,
                                std::size_t eps_index, std::size_t n_est,
                                std::size_t n_eps) {
  return (replicate * n_est + estimator) * n_eps + eps_index;
}

inline constexpr std::uint64_t kDataStreamBit = 1ULL << 63;

inline void warn_failed_fit(const std::string& estimator, double eps, const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", eps);
  warn(estimator + " at eps=" + buf + " failed: " + what);
}

}  // namespace internal

// --- cross-validation -------------------------------------------------------------

inline constexpr const char* kMetricTestMse = "test_mse";
inline constexpr const char* kMetricOptimizationError = "optimization_error";

// Fold assignment of one trial: a seeded permutation cut into k nearly equal
// blocks. If n / k < d, k is reduced (with a warning) so every fold holds at
// least d rows.
inline std::vector<std::vector<Eigen::Index>> make_folds(Eigen::Index n, Eigen::Index d,
                                                         int folds, RngStream& rng) {
  int k = folds;
  if (n / k < d) {
    k = static_cast<int>(n / std::max<Eigen::Index>(d, 1));
    if (k < 2) throw DataError("cross_validate: too few rows for two folds of size d");
    warn("cross_validate: folds smaller than d rows, merged down to " +
         std::to_string(k) + " folds");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng.engine())]);
  }
  std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out[i % static_cast<std::size_t>(k)].push_back(perm[i]);
  }
  return out;
}

inline Mat take_rows(const Mat& x, const std::vector<Eigen::Index>& idx) {
  Mat out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  }
  return out;
}

inline Vec take_rows(const Vec& y, const std::vector<Eigen::Index>& idx) {
  Vec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(idx[i]);
  return out;
}

// k-fold cross-validation repeated `trials` times on raw (unpreprocessed)
// data. Each fold is preprocessed on its training rows only. Emits test MSE
// and training-fold optimization error for every (estimator, eps) pair; the
// delta rule is evaluated at the full n.
inline std::vector<ResultRow> cross_validate(const ExperimentSpec& spec, const Mat& raw_x,
                                             const Vec& raw_y, const std::string& dataset_id,
                                             int jobs = 1) {
  spec.validate();
  const std::size_t n_est = spec.estimators.size();
  const std::size_t n_eps = spec.eps.size();
  if (n_est == 0 || n_eps == 0) return {};
  const double delta = spec.delta_rule.delta_for(static_cast<double>(raw_x.rows()));

  std::vector<std::vector<std::vector<Eigen::Index>>> splits;
  for (int t = 0; t < spec.trials; ++t) {
    RngStream split_rng(spec.seed, internal::kDataStreamBit | static_cast<std::uint64_t>(t));
    splits.push_back(make_folds(raw_x.rows(), raw_x.cols(), spec.folds, split_rng));
  }
  const std::size_t k = splits.front().size();
  const std::size_t replicates = static_cast<std::size_t>(spec.trials) * k;

  // samples[(est * n_eps + e) * 2 + metric]
  std::vector<CellSamples> samples(n_est * n_eps * 2);
  for (auto& s : samples) {
    s.values.assign(replicates, std::numeric_limits<double>::quiet_NaN());
    s.degenerate.assign(replicates, 0);
  }

  parallel_for(replicates, jobs, [&](std::size_t rep) {
    const auto& folds = splits[rep / k];
    const std::size_t f = rep % k;
    std::vector<Eigen::Index> train_idx;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::vector<Eigen::Index> test_idx = folds[f];
    std::sort(test_idx.begin(), test_idx.end());
    const SplitData split =
        preprocess_split(take_rows(raw_x, train_idx), take_rows(raw_y, train_idx),
                         take_rows(raw_x, test_idx), take_rows(raw_y, test_idx));
    for (std::size_t est = 0; est < n_est; ++est) {
      for (std::size_t e = 0; e < n_eps; ++e) {
        RngStream rng(spec.seed, internal::fit_stream(rep, est, e, n_est, n_eps));
        auto& mse_slot = samples[(est * n_eps + e) * 2];
        auto& opt_slot = samples[(est * n_eps + e) * 2 + 1];
        try {
          const FitResult fit = run_estimator(spec.estimators[est], split.train,
                                              spec.eps[e], delta, spec.varrho, rng);
          mse_slot.values[rep] = test_mse(split.test_x, split.test_y, fit.theta);
          opt_slot.values[rep] = optimization_error(split.train, fit.theta).value;
          mse_slot.degenerate[rep] = opt_slot.degenerate[rep] = fit.degenerate ? 1 : 0;
        } catch (const std::runtime_error& err) {
          internal::warn_failed_fit(spec.estimators[est].id, spec.eps[e], err.what());
        }
      }
    }
  });

  std::vector<ResultRow> rows;
  for (std::size_t est = 0; est < n_est; ++est) {
    for (std::size_t e = 0; e < n_eps; ++e) {
      for (int m = 0; m < 2; ++m) {
        ResultRow row;
        row.dataset = dataset_id;
        row.estimator = spec.estimators[est].id;
        row.eps = spec.eps[e];
        row.delta = delta;
        row.metric = m == 0 ? kMetricTestMse : kMetricOptimizationError;
        row.trials = spec.trials;
        summarize(samples[(est * n_eps + e) * 2 + static_cast<std::size_t>(m)], row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

// --- synthetic convergence sweep --------------------------------------------------

inline constexpr const char* kMetricRelEfficiency = "rel_efficiency";
inline constexpr const char* kMetricEstimationMse = "estimation_mse";

struct SyntheticSweepSpec {
  std::vector<Eigen::Index> n_grid;
  Eigen::Index d = 10;
  double sigma = 1.0;
  std::vector<EstimatorConfig> estimators;
  std::vector<double> eps;
  DeltaRule delta_rule{DeltaRule::Kind::kInvN2, 0.0};
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
  double varrho = kDefaultVarrho;

  void validate() const {
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (auto n : n_grid) {
      if (n < d) throw std::invalid_argument("every n must be >= d");
    }
    for (double e : eps) {
      if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("eps must be > 0");
    }
  }
};

inline std::string synthetic_dataset_id(Eigen::Index n, Eigen::Index d, double sigma) {
  return "synth:n=" + std::to_string(n) + ",d=" + std::to_string(d) +
         ",sigma=" + format_g9(sigma);
}

// Parses "lo:hi:log" (or "lo:hi:log:count"), or a comma list of sizes.
// "1e2:1e6:log" gives one point per decade.
inline std::vector<Eigen::Index> parse_n_grid(const std::string& text) {
  std::vector<Eigen::Index> out;
  const auto parts = internal::split(text, ':');
  if (parts.size() == 3 || parts.size() == 4) {
    const auto lo = internal::parse_double(parts[0]);
    const auto hi = internal::parse_double(parts[1]);
    if (!lo || !hi || !(*lo >= 1.0) || !(*hi >= *lo) || parts[2] != "log") {
      throw std::invalid_argument("n-grid must look like lo:hi:log[:count]");
    }
    int count = static_cast<int>(std::lround(std::log10(*hi / *lo))) + 1;
    if (parts.size() == 4) count = internal::parse_int(parts[3], "n-grid count");
    if (count < 1) throw std::invalid_argument("n-grid count must be >= 1");
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      const auto n = static_cast<Eigen::Index>(
          std::llround(std::exp(std::log(*lo) + t * (std::log(*hi) - std::log(*lo)))));
      if (out.empty() || out.back() != n) out.push_back(n);
    }
    return out;
  }
  for (const auto& item : internal::split(text, ',')) {
    const auto v = internal::parse_double(item);
    if (!v || !(*v >= 1.0) || *v != std::floor(*v)) {
      throw std::invalid_argument("n-grid item '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<Eigen::Index>(*v));
  }
  return out;
}

// For every n: `trials` synthetic data sets; every estimator and eps fits each
// one. Metrics: relative efficiency, estimation MSE, optimization error.
inline std::vector<ResultRow> run_synthetic_sweep(const SyntheticSweepSpec& spec,
                                                  int jobs = 1) {
  spec.validate();
  const std::size_t n_est = spec.estimators.size();
  const std::size_t n_eps = spec.eps.size();
  std::vector<ResultRow> rows;
  if (n_est == 0 || n_eps == 0) return rows;
  constexpr int kMetrics = 3;
  const char* metric_names[kMetrics] = {kMetricRelEfficiency, kMetricEstimationMse,
                                        kMetricOptimizationError};
  const auto trials = static_cast<std::size_t>(spec.trials);
  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
    const Eigen::Index n = spec.n_grid[ni];
    const double delta = spec.delta_rule.delta_for(static_cast<double>(n));
    std::vector<CellSamples> samples(n_est * n_eps * kMetrics);
    for (auto& s : samples) {
      s.values.assign(trials, std::numeric_limits<double>::quiet_NaN());
      s.degenerate.assign(trials, 0);
    }
    parallel_for(trials, jobs, [&](std::size_t t) {
      const std::uint64_t replicate = ni * trials + t;
      RngStream data_rng(spec.seed, internal::kDataStreamBit | replicate);
      SyntheticSpec ss;
      ss.n = n;
      ss.d = spec.d;
      ss.sigma = spec.sigma;
      const SyntheticData sd = synth_linear_gaussian(ss, data_rng);
      const SymMatrix xtx = SymMatrix::gram(sd.data.x());
      for (std::size_t est = 0; est < n_est; ++est) {
        for (std::size_t e = 0; e < n_eps; ++e) {
          RngStream rng(spec.seed, internal::fit_stream(replicate, est, e, n_est, n_eps));
          const std::size_t base = (est * n_eps + e) * kMetrics;
          try {
            const FitResult fit = run_estimator(spec.estimators[est], sd.data, spec.eps[e],
                                                delta, spec.varrho, rng);
            const EstimationMetrics em =
                estimation_metrics(fit.theta, sd.theta0, xtx, spec.sigma);
            samples[base].values[t] = em.rel_efficiency;
            samples[base + 1].values[t] = em.mse;
            samples[base + 2].values[t] = optimization_error(sd.data, fit.theta).value;
            for (int m = 0; m < kMetrics; ++m) {
              samples[base + static_cast<std::size_t>(m)].degenerate[t] =
                  fit.degenerate ? 1 : 0;
            }
          } catch (const std::runtime_error& err) {
            internal::warn_failed_fit(spec.estimators[est].id, spec.eps[e], err.what());
          }
        }
      }
    });
    const std::string id = synthetic_dataset_id(n, spec.d, spec.sigma);
    for (std::size_t est = 0; est < n_est; ++est) {
      for (std::size_t e = 0; e < n_eps; ++e) {
        for (int m = 0; m < kMetrics; ++m) {
          ResultRow row;
          row.dataset = id;
          row.estimator = spec.estimators[est].id;
          row.eps = spec.eps[e];
          row.delta = delta;
          row.metric = metric_names[m];
          row.trials = spec.trials;
          summarize(samples[(est * n_eps + e) * kMetrics + static_cast<std::size_t>(m)], row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

// Runs the CSV cross-validation described by `spec`.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, int jobs = 1) {
  spec.validate();
  if (spec.estimators.empty() || spec.eps.empty()) return {};
  if (spec.dataset.empty()) throw DataError("experiment spec has no dataset");
  const RawTable table = read_csv(spec.dataset, spec.target_col);
  return cross_validate(spec, table.x, table.y, spec.dataset, jobs);
}

}  // namespace dp_linreg
