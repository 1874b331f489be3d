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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dp_linreg/dp_linreg.hpp"

namespace dp_linreg {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SymMatrix random_spd(Eigen::Index d, RngStream& rng, double ridge) {
  Mat a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  return SymMatrix(a * a.transpose() + ridge * Mat::Identity(d, d));
}

// 1. Posterior moments of the Gaussian sampler.
Outcome posterior_moments() {
  RngStream rng(1001, 0);
  const SyntheticData s = [&] {
    SyntheticSpec spec;
    spec.n = 200;
    spec.d = 3;
    return synth_linear_gaussian(spec, rng);
  }();
  const double lambda = 0.5;
  const double gamma = 2.0;
  const SymMatrix h = SymMatrix::gram(s.data.x()).plus_diagonal(lambda);
  const Vec mode = ridge_solve(SymMatrix::gram(s.data.x()),
                               s.data.x().transpose() * s.data.y(), lambda);
  const Mat cov = (gamma * h.matrix()).inverse();
  const SymMatrix precision = h.scaled(gamma);
  const int draws = 100000;
  Vec sum = Vec::Zero(3);
  Mat outer = Mat::Zero(3, 3);
  std::vector<Vec> samples;
  samples.reserve(draws);
  for (int i = 0; i < draws; ++i) {
    samples.push_back(sample_gauss_precision(mode, precision, rng));
    sum += samples.back();
  }
  const Vec mean = sum / draws;
  for (const Vec& t : samples) outer += (t - mean) * (t - mean).transpose();
  const Mat emp_cov = outer / (draws - 1);
  double worst_z = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double se = std::sqrt(emp_cov(j, j) / draws);
    worst_z = std::max(worst_z, std::abs(mean(j) - mode(j)) / se);
  }
  const double rel_cov = (emp_cov - cov).norm() / cov.norm();
  return {worst_z <= 4.0 && rel_cov <= 0.05,
          fmt("max |mean - mode| = %.3f stderr, covariance rel. Frobenius error %.4f",
              worst_z, rel_cov)};
}

// 2. SSP estimate equals theta* + (X^T X + E1)^{-1} (E2 - E1 theta*).
Outcome ssp_identity() {
  RngStream rng(1002, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    SyntheticSpec spec;
    spec.n = 40;
    spec.d = 3;
    RngStream data_rng(1002, 1000 + static_cast<std::uint64_t>(rep));
    const SyntheticData s = synth_linear_gaussian(spec, data_rng);
    const SymMatrix unit = sample_sym_gauss(3, 1.0, rng);
    const Vec z = rng.normal_vector(3);
    const PrivacyBudget budget(100.0, 1e-6);
    const FitResult fit = ssp_fit_with_noise(s.data, budget, unit, z);
    const ReleaseParams p = ssp_release_part(budget);
    const Mat e1 = suff_stats_matrix_scale(s.data.bound_x(), p) * unit.matrix();
    const Vec e2 = suff_stats_vector_scale(s.data.bound_x(), s.data.bound_y(), p) * z;
    const Mat xtx = s.data.x().transpose() * s.data.x();
    const Vec star = xtx.ldlt().solve(s.data.x().transpose() * s.data.y());
    const Vec predicted = star + (xtx + e1).fullPivLu().solve(e2 - e1 * star);
    worst = std::max(worst, (fit.theta - predicted).norm() / std::max(1.0, predicted.norm()));
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g over 100 instances", worst)};
}

// 3. Direct and quadratic-form optimization error agree.
Outcome prediction_estimation_identity() {
  RngStream rng(1003, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    SyntheticSpec spec;
    spec.n = 50 + 10 * rep;
    spec.d = 1 + rep % 8;
    const SyntheticData s = synth_linear_gaussian(spec, rng);
    const Vec theta = rng.normal_vector(spec.d) * (0.01 + rep % 5);
    const OptimizationError e = optimization_error(s.data, theta);
    worst = std::max(worst, std::abs(e.direct - e.quadratic) / e.quadratic);
  }
  return {worst <= 1e-8, fmt("max relative disagreement %.3g over 100 instances", worst)};
}

// 4. Concentration of |E theta|_A^2 for a symmetric Gaussian E.
Outcome jl_ellipsoid() {
  RngStream rng(1004, 0);
  const Eigen::Index d = 5;
  const double varrho = 0.05;
  const double w = 1.7;
  const int draws = 10000;
  int fails = 0;
  for (int i = 0; i < draws; ++i) {
    const SymMatrix a = random_spd(d, rng, 0.1);
    const Vec theta = rng.normal_vector(d);
    const SymMatrix e = sample_sym_gauss(d, w, rng);
    const Vec et = e.matrix() * theta;
    const double lhs = et.dot(a.matrix() * et);
    const double rhs = w * w * a.matrix().trace() * theta.squaredNorm() *
                       std::log(2.0 * d * d / varrho);
    fails += lhs > rhs;
  }
  const double freq = static_cast<double>(fails) / draws;
  return {freq <= varrho + 0.01, fmt("failure frequency %.4f (limit %.2f)", freq, varrho + 0.01)};
}

// 5. Budget quadratics: residuals and small-delta limits.
Outcome budget_quadratics() {
  const std::vector<double> eps_grid = {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> delta_grid = {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
  double worst_res = 0.0;
  for (EpsTildeForm form : {EpsTildeForm::kProduct, EpsTildeForm::kSum}) {
    for (double e : eps_grid) {
      for (double d : delta_grid) {
        const double l = log6_over(d);
        const AdaOpsBudget b = adaops_budget(e, d, form);
        const double r1 = eps_bar_coefficient(l) * b.eps_bar * b.eps_bar + b.eps_bar - e / 4.0;
        const double r2 =
            eps_tilde_coefficient(l, form) * b.eps_tilde * b.eps_tilde + b.eps_tilde - e / 2.0;
        worst_res = std::max({worst_res, std::abs(r1), std::abs(r2)});
      }
    }
  }
  double worst_bar = 0.0;
  double worst_tilde = 0.0;
  for (double e : eps_grid) {
    const AdaOpsBudget b = adaops_budget(e, 1e-300);
    worst_bar = std::max(worst_bar, std::abs(b.eps_bar - e / 4.0));
    worst_tilde = std::max(worst_tilde, std::abs(b.eps_tilde - e / 2.0));
  }
  const bool pass = worst_res <= 1e-12 && worst_bar <= 1e-6 && worst_tilde <= 1e-6;
  return {pass, fmt("max residual %.3g; at delta=1e-300 max |eps_bar - eps/4| = %.3g, "
                    "max |eps_tilde - eps/2| = %.3g",
                    worst_res, worst_bar, worst_tilde)};
}

// 6. Ridge-parameter optimizer against a dense log-grid.
Outcome lambda_optimizer() {
  RngStream rng(1006, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const double c1 = std::pow(10.0, -1.0 + 5.0 * rng.uniform01());
    const double c2 = std::pow(10.0, -1.0 + 3.0 * rng.uniform01());
    const double tilde = rep % 3 == 0 ? 0.0 : std::pow(10.0, -2.0 + 5.0 * rng.uniform01());
    const double t_min = rep % 2 == 0 ? 0.0 : std::pow(10.0, -2.0 + 3.0 * rng.uniform01());
    const double lam = adaops_choose_lambda(tilde, 1.0, c1, c2, t_min);
    const double got = adaops_lambda_objective(lam, tilde, 1.0, c1, c2);
    double best = adaops_lambda_objective(t_min, tilde, 1.0, c1, c2);
    const double lo = std::max(t_min, 1e-6);
    const double hi = 1e10;
    const int points = 10000;
    for (int i = 0; i < points; ++i) {
      const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
      best = std::min(best, adaops_lambda_objective(t, tilde, 1.0, c1, c2));
    }
    worst = std::max(worst, (got - best) / best);
  }
  return {worst <= 1e-4, fmt("max relative excess over grid %.3g (negative is better)", worst)};
}

// 7. Every OPS calibration satisfies the privacy bound.
Outcome ops_safety() {
  const std::vector<double> eps_grid = {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  const std::vector<double> delta_grid = {1e-4, 1e-6, 1e-8, 1e-10};
  const std::vector<double> n_grid = {100.0, 1e3, 1e4, 1e5, 1e6};
  double worst = -std::numeric_limits<double>::infinity();
  int checked = 0;
  int infeasible = 0;
  for (OpsVariant v : {OpsVariant::kDiffuse, OpsVariant::kConcentrated, OpsVariant::kBalanced,
                       OpsVariant::kConservative}) {
    for (double e : eps_grid) {
      for (double d : delta_grid) {
        for (double n : n_grid) {
          OpsStrategy s;
          s.variant = v;
          try {
            const OpsCalibration c = ops_calibrate(s, e, d, n, 1.0, 1.0, 10);
            const double p = pdp_epsilon(c.gamma, ops_lipschitz_bound(c.lambda, n, 1.0, 1.0),
                                         c.lambda, 0.0, 1.0, d);
            worst = std::max(worst, p - e);
            ++checked;
          } catch (const InfeasibleBudgetError&) {
            ++infeasible;
          }
        }
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "max (pdp_epsilon - eps) = %.3g over %d calibrations; %d infeasible "
                "(rejected, nothing released)",
                worst, checked, infeasible);
  return {worst <= 1e-9, buf};
}

double cell_mean(const std::vector<ResultRow>& rows, const std::string& dataset,
                 const std::string& est, double eps, const std::string& metric) {
  for (const auto& r : rows) {
    if (r.dataset == dataset && r.estimator == est && r.eps == eps && r.metric == metric) {
      return r.mean;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// 8. Relative efficiency approaches 1 as n grows.
Outcome asymptotic_efficiency() {
  SyntheticSweepSpec spec;
  spec.n_grid = {1000, 10000, 100000};
  spec.d = 10;
  spec.sigma = 1.0;
  spec.estimators = {parse_estimator("ols"), parse_estimator("adassp"),
                     parse_estimator("adaops")};
  spec.eps = {1.0};
  spec.delta_rule = DeltaRule::parse("inv_n2");
  spec.trials = 50;
  spec.seed = 1;
  const auto rows = run_synthetic_sweep(spec, 0);
  bool pass = true;
  std::string detail;
  for (const char* est : {"ols", "adassp", "adaops"}) {
    std::vector<double> v;
    for (auto n : spec.n_grid) {
      v.push_back(cell_mean(rows, synthetic_dataset_id(n, 10, 1.0), est, 1.0,
                            kMetricRelEfficiency));
    }
    detail += std::string(est) + fmt(" [%.4g, %.4g, %.4g] ", v[0], v[1], v[2]);
    if (std::string(est) == "ols") {
      for (double x : v) pass = pass && x >= 0.95 && x <= 1.05;
    } else {
      pass = pass && v[0] > v[1] && v[1] > v[2] && v[2] <= 1.3;
    }
  }
  return {pass, detail};
}

// 9. Adaptive estimators are competitive on standardized data.
Outcome desk_ordering() {
  RngStream rng(1009, 0);
  const Eigen::Index n = 1000;
  const Eigen::Index d = 10;
  // Raw data on heterogeneous scales; the harness standardizes it.
  Mat x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = 3.0 * j + (1.0 + j) * rng.normal();
  }
  Vec beta(d);
  for (Eigen::Index j = 0; j < d; ++j) beta(j) = rng.uniform01() / (1.0 + j);
  const Vec y = x * beta + rng.normal_vector(n);

  ExperimentSpec spec;
  spec.estimators = {parse_estimator("adaops"), parse_estimator("adassp"),
                     parse_estimator("ssp"), parse_estimator("objpert"),
                     parse_estimator("ops-balanced")};
  spec.eps = {0.1, 1.0};
  spec.trials = 20;
  spec.seed = 1;
  const auto rows = cross_validate(spec, x, y, "desk", 0);
  bool pass = true;
  std::string detail;
  for (double e : spec.eps) {
    auto m = [&](const char* est) { return cell_mean(rows, "desk", est, e, kMetricTestMse); };
    const double best_other = std::min({m("objpert"), m("ops-balanced"), m("ssp")});
    pass = pass && m("adassp") <= m("ssp") && m("adassp") <= 1.1 * best_other &&
           m("adaops") <= 1.1 * best_other;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "eps=%g: adaops %.4g adassp %.4g ssp %.4g objpert %.4g ops %.4g; ", e,
                  m("adaops"), m("adassp"), m("ssp"), m("objpert"), m("ops-balanced"));
    detail += buf;
  }
  return {pass, detail};
}

// 10. Private estimators converge to the least-squares solution at huge eps.
Outcome consistency() {
  RngStream data_rng(1010, 0);
  SyntheticSpec spec;
  spec.n = 500;
  spec.d = 5;
  const SyntheticData s = synth_linear_gaussian(spec, data_rng);
  const double eps = 1e6;
  const double delta = 1e-6;
  std::string detail;
  bool pass = true;
  const std::vector<std::string> names = {"adaops",       "adassp",           "ssp",
                                          "ops-diffuse",  "ops-concentrated", "ops-balanced",
                                          "ops-conservative", "objpert:theta=100"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    RngStream rng(1010, 1 + i);
    const FitResult fit =
        run_estimator(parse_estimator(names[i]), s.data, eps, delta, kDefaultVarrho, rng);
    const double err = optimization_error(s.data, fit.theta).value;
    pass = pass && err <= 1e-3;
    detail += names[i] + fmt(" %.2g; ", err);
  }
  return {pass, detail};
}

// 11. Tail bounds of the two scalar releases.
Outcome release_tails() {
  RngStream rng(1011, 0);
  SyntheticSpec spec;
  spec.n = 300;
  spec.d = 4;
  const SyntheticData s = synth_linear_gaussian(spec, rng);
  const SufficientStats st = SufficientStats::of(s.data);
  const Vec theta = ridge_solve(st.xtx, st.xty, 1.0);
  const double true_lip = s.data.bound_x() * (s.data.bound_y() + s.data.bound_x() * theta.norm());
  const int trials = 100000;
  bool pass = true;
  std::string detail;
  // Releases exactly as the adaptive estimator configures them.
  for (double delta : {0.03, 1e-3, 1e-6}) {
    const double l6 = log6_over(delta);
    const double dp = delta / 3.0;
    const ReleaseParams p = ReleaseParams::with_log_term(0.25, dp, l6);
    int fail_min = 0;
    int fail_lip = 0;
    for (int i = 0; i < trials; ++i) {
      fail_min += release_min_eigenvalue(st.lambda_min, 1.0, p, rng).value > st.lambda_min;
      const ReleasedScalar r =
          release_log_lipschitz(theta.norm(), 1.0, s.data.bound_y(), 1.0 + st.lambda_min, p, rng);
      fail_lip += s.data.bound_x() * std::exp(r.value) < true_lip;
    }
    const double f1 = static_cast<double>(fail_min) / trials;
    const double f2 = static_cast<double>(fail_lip) / trials;
    pass = pass && f1 <= dp + 0.01 && f2 <= dp + 0.01;
    char buf[160];
    std::snprintf(buf, sizeof buf, "delta'=%.3g: lambda_min %.5f, Lipschitz %.5f; ", dp, f1, f2);
    detail += buf;
  }
  return {pass, detail};
}

}  // namespace
}  // namespace dp_linreg

int main() {
  using namespace dp_linreg;
  set_warning_sink([](std::string_view) {});
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"posterior moments", posterior_moments},
      {"SSP perturbation identity", ssp_identity},
      {"prediction/estimation identity", prediction_estimation_identity},
      {"symmetric Gaussian ellipsoid bound", jl_ellipsoid},
      {"budget quadratics", budget_quadratics},
      {"ridge-parameter optimizer", lambda_optimizer},
      {"OPS calibration safety", ops_safety},
      {"asymptotic efficiency", asymptotic_efficiency},
      {"ordering on standardized data", desk_ordering},
      {"consistency at large eps", consistency},
      {"release tail bounds", release_tails},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s  %2zu  %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
