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

// Private and non-private linear regression estimators.
//
// Every private fit records its sub-releases in a BudgetLedger whose totals
// reproduce the configured (epsilon, delta) exactly. Fits are pure functions
// of (data, budget, rng state); none holds global state.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dp_linreg/calibration.hpp"
#include "dp_linreg/dataset.hpp"
#include "dp_linreg/errors.hpp"
#include "dp_linreg/mechanisms.hpp"
#include "dp_linreg/numerics.hpp"
#include "dp_linreg/random.hpp"

namespace dp_linreg {

enum class Method { kTrivial, kOls, kAdaOps, kAdaSsp, kSsp, kOps, kObjPert };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kTrivial: return "trivial";
    case Method::kOls: return "ols";
    case Method::kAdaOps: return "adaops";
    case Method::kAdaSsp: return "adassp";
    case Method::kSsp: return "ssp";
    case Method::kOps: return "ops";
    case Method::kObjPert: return "objpert";
  }
  return "unknown";
}

struct FitResult {
  Vec theta;
  Method method = Method::kTrivial;
  std::string tag;  // method name plus variant, e.g. "ops-balanced"
  double lambda = 0.0;
  std::optional<double> gamma;
  std::optional<double> tilde_lambda_min;
  std::optional<double> lipschitz_released;
  std::optional<PrivacyBudget> budget_spent;  // empty for non-private fits
  BudgetLedger ledger;
  bool degenerate = false;
  std::optional<std::uint64_t> rng_seed;
  std::optional<std::uint64_t> rng_stream;
  std::optional<std::uint64_t> rng_fingerprint;
  // Further calibration quantities in the order they were computed.
  std::vector<std::pair<std::string, double>> diagnostics;

  bool is_private() const { return budget_spent.has_value(); }
};

namespace internal {

inline FitResult start_result(Method m, std::string tag, const RngStream* rng) {
  FitResult r;
  r.method = m;
  r.tag = std::move(tag);
  if (rng != nullptr) {
    r.rng_seed = rng->seed();
    r.rng_stream = rng->stream();
    r.rng_fingerprint = rng->fingerprint();
  }
  return r;
}

inline void finish_private(FitResult& r) {
  r.budget_spent = PrivacyBudget(r.ledger.total_epsilon(), r.ledger.total_delta());
  require_finite(r.theta, "fitted theta");
}

}  // namespace internal

// --- non-private baselines -----------------------------------------------

inline FitResult ols_fit(const Dataset& data, double lambda) {
  FitResult r = internal::start_result(Method::kOls, "ols", nullptr);
  const SufficientStats s = SufficientStats::of(data);
  r.lambda = lambda;
  r.theta = ridge_solve(s.xtx, s.xty, lambda);
  return r;
}

inline FitResult trivial_fit(const Dataset& data) {
  FitResult r = internal::start_result(Method::kTrivial, "trivial", nullptr);
  r.theta = Vec::Zero(data.d());
  return r;
}

// --- sufficient statistics perturbation ------------------------------------

inline ReleaseParams ssp_release_part(const PrivacyBudget& budget) {
  return ReleaseParams::with_log_term(budget.epsilon() / 2.0, budget.delta() / 2.0,
                                      std::log(4.0 / budget.delta()));
}

// Solves the released normal equations with lambda = 0. A released Gram matrix
// that is not positive definite goes through the pseudo-inverse and marks the
// fit degenerate.
inline FitResult ssp_from_release(const ReleasedStats& rel, FitResult r) {
  if (is_positive_definite(rel.xtx_hat)) {
    r.theta = ridge_solve(rel.xtx_hat, rel.xty_hat, 0.0);
  } else {
    r.theta = pinv_solve(rel.xtx_hat, rel.xty_hat);
    r.degenerate = true;
  }
  r.diagnostics.emplace_back("matrix_noise_scale", rel.matrix_noise_scale);
  r.diagnostics.emplace_back("vector_noise_scale", rel.vector_noise_scale);
  internal::finish_private(r);
  return r;
}

// SSP with caller-supplied standard-normal noise (unit_matrix_noise has
// N(0, 1) upper triangle).
inline FitResult ssp_fit_with_noise(const Dataset& data, const PrivacyBudget& budget,
                                    const SymMatrix& unit_matrix_noise,
                                    const Vec& unit_vector_noise) {
  FitResult r = internal::start_result(Method::kSsp, "ssp", nullptr);
  const SufficientStats s = SufficientStats::of(data);
  const ReleaseParams part = ssp_release_part(budget);
  const auto eps = split_evenly(budget.epsilon(), 2);
  const auto del = split_evenly(budget.delta(), 2);
  const ReleaseParams mp = ReleaseParams::with_log_term(eps[0], del[0], part.log_term);
  const ReleaseParams vp = ReleaseParams::with_log_term(eps[1], del[1], part.log_term);
  const ReleasedStats rel =
      release_suff_stats_with_noise(s.xtx, s.xty, data.bound_x(), data.bound_y(),
                                    mp, vp, unit_matrix_noise, unit_vector_noise);
  r.ledger.record("xtx", mp.epsilon, mp.delta);
  r.ledger.record("xty", vp.epsilon, vp.delta);
  return ssp_from_release(rel, std::move(r));
}

inline FitResult ssp_fit(const Dataset& data, const PrivacyBudget& budget,
                         RngStream& rng) {
  const RngStream id = rng;
  const SymMatrix e = sample_sym_gauss(data.d(), 1.0, rng);
  const Vec z = rng.normal_vector(data.d());
  FitResult r = ssp_fit_with_noise(data, budget, e, z);
  r.rng_seed = id.seed();
  r.rng_stream = id.stream();
  r.rng_fingerprint = id.fingerprint();
  return r;
}

// --- AdaSSP ------------------------------------------------------------------

struct AdaSspOverrides {
  std::optional<double> tilde_lambda_min;  // replaces the released value
};

inline FitResult adassp_fit(const Dataset& data, const PrivacyBudget& budget,
                            double varrho, RngStream& rng,
                            const AdaSspOverrides& overrides = {}) {
  if (!(varrho > 0.0 && varrho < 1.0)) {
    throw std::invalid_argument("adassp_fit: varrho must lie in (0, 1)");
  }
  FitResult r = internal::start_result(Method::kAdaSsp, "adassp", &rng);
  const SufficientStats s = SufficientStats::of(data);
  const double l6 = log6_over(budget.delta());
  const auto eps = split_evenly(budget.epsilon(), 3);
  const auto del = split_evenly(budget.delta(), 3);
  const ReleaseParams p_lmin = ReleaseParams::with_log_term(eps[0], del[0], l6);
  const ReleaseParams p_xtx = ReleaseParams::with_log_term(eps[1], del[1], l6);
  const ReleaseParams p_xty = ReleaseParams::with_log_term(eps[2], del[2], l6);

  const ReleasedScalar lmin = release_min_eigenvalue(s.lambda_min, data.bound_x(),
                                                     p_lmin, rng);
  r.ledger.record("lambda_min", p_lmin.epsilon, p_lmin.delta);
  const double tilde = overrides.tilde_lambda_min.value_or(lmin.value);
  r.tilde_lambda_min = tilde;

  r.lambda = adassp_lambda(tilde, data.bound_x(), static_cast<int>(data.d()), l6,
                           varrho, p_lmin.epsilon);
  const ReleasedStats rel = release_suff_stats(s.xtx, s.xty, data.bound_x(),
                                               data.bound_y(), p_xtx, p_xty, rng);
  r.ledger.record("xtx", p_xtx.epsilon, p_xtx.delta);
  r.ledger.record("xty", p_xty.epsilon, p_xty.delta);
  r.theta = ridge_solve(rel.xtx_hat, rel.xty_hat, r.lambda);
  r.diagnostics.emplace_back("matrix_noise_scale", rel.matrix_noise_scale);
  r.diagnostics.emplace_back("vector_noise_scale", rel.vector_noise_scale);
  internal::finish_private(r);
  return r;
}

// --- AdaOPS ------------------------------------------------------------------

struct AdaOpsOverrides {
  std::optional<double> tilde_lambda_min;  // replaces the released value
  std::optional<double> gamma;             // replaces the calibrated value
};

struct AdaOpsOptions {
  double varrho = kDefaultVarrho;
  EpsTildeForm eps_tilde_form = EpsTildeForm::kProduct;
};

// Largest epsilon for which the budget quadratics behave as analyzed.
inline double adaops_epsilon_threshold(double delta) {
  const double l = log6_over(delta);
  return 2.0 * l / (1.0 + l);
}

inline FitResult adaops_fit(const Dataset& data, const PrivacyBudget& budget,
                            RngStream& rng, const AdaOpsOptions& options = {},
                            const AdaOpsOverrides& overrides = {}) {
  FitResult r = internal::start_result(Method::kAdaOps, "adaops", &rng);
  const double eps = budget.epsilon();
  const double delta = budget.delta();
  const double bx = data.bound_x();
  const double l6 = log6_over(delta);
  if (eps >= adaops_epsilon_threshold(delta)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "adaops: eps = %.6g is at or above 2 log(6/delta)/(1 + log(6/delta))"
                  " = %.6g",
                  eps, adaops_epsilon_threshold(delta));
    warn(buf);
  }
  const SufficientStats s = SufficientStats::of(data);
  const double e_quarter = eps / 4.0;
  const double e_half = eps - 2.0 * e_quarter;
  const auto del = split_evenly(delta, 3);

  const ReleaseParams p_lmin = ReleaseParams::with_log_term(e_quarter, del[0], l6);
  const ReleasedScalar lmin = release_min_eigenvalue(s.lambda_min, bx, p_lmin, rng);
  r.ledger.record("lambda_min", p_lmin.epsilon, p_lmin.delta);
  const double tilde = overrides.tilde_lambda_min.value_or(lmin.value);
  r.tilde_lambda_min = tilde;

  AdaOpsParams hp;
  const AdaOpsBudget b = adaops_budget(eps, delta, options.eps_tilde_form);
  hp.eps_bar = b.eps_bar;
  hp.eps_tilde = b.eps_tilde;
  hp.c1 = c_constants(hp.eps_bar, l6, options.varrho, static_cast<int>(data.d())).c1;
  hp.c2 = l6 / e_quarter;
  hp.t_min = adaops_t_min(tilde, bx, eps, l6);
  hp.lambda = adaops_choose_lambda(tilde, bx, hp.c1, hp.c2, hp.t_min);
  r.lambda = hp.lambda;

  const Vec theta_hat = ridge_solve(s.xtx, s.xty, hp.lambda);
  const ReleaseParams p_lip = ReleaseParams::with_log_term(e_quarter, del[1], l6);
  const ReleasedScalar delta_rel =
      release_log_lipschitz(theta_hat.norm(), bx, data.bound_y(), hp.lambda + tilde,
                            p_lip, rng);
  r.ledger.record("log_lipschitz", p_lip.epsilon, p_lip.delta);
  const double lip = bx * std::exp(delta_rel.value);
  r.lipschitz_released = lip;

  hp.gamma = overrides.gamma.value_or((tilde + hp.lambda) * hp.eps_tilde *
                                      hp.eps_tilde / (l6 * lip * lip));
  r.gamma = hp.gamma;
  r.ledger.record("posterior_sample", e_half, del[2]);

  const SymMatrix precision = s.xtx.plus_diagonal(hp.lambda).scaled(hp.gamma);
  r.theta = sample_gauss_precision(theta_hat, precision, rng);
  r.diagnostics = {{"eps_bar", hp.eps_bar}, {"eps_tilde", hp.eps_tilde},
                   {"c1", hp.c1},           {"c2", hp.c2},
                   {"t_min", hp.t_min},     {"log_lipschitz", delta_rel.value}};
  internal::finish_private(r);
  return r;
}

// --- OPS with fixed (epsilon, delta) calibration -----------------------------

inline FitResult ops_fit(const Dataset& data, const PrivacyBudget& budget,
                         const OpsStrategy& strategy, RngStream& rng,
                         double varrho = kDefaultVarrho) {
  FitResult r = internal::start_result(
      Method::kOps, std::string("ops-") + std::string(to_string(strategy.variant)), &rng);
  const OpsCalibration cal =
      ops_calibrate(strategy, budget.epsilon(), budget.delta(),
                    static_cast<double>(data.n()), data.bound_x(), data.bound_y(),
                    static_cast<int>(data.d()), varrho);
  const double check = pdp_epsilon(cal.gamma, cal.lipschitz, cal.lambda, 0.0,
                                   data.bound_x(), budget.delta());
  if (!(check <= budget.epsilon() + 1e-9)) {
    throw std::logic_error("ops_fit: calibrated (lambda, gamma) exceeds epsilon");
  }
  const SufficientStats s = SufficientStats::of(data);
  const Vec mode = ridge_solve(s.xtx, s.xty, cal.lambda);
  r.lambda = cal.lambda;
  r.gamma = cal.gamma;
  r.ledger.record("posterior_sample", budget.epsilon(), budget.delta());
  r.theta = sample_gauss_precision(mode, s.xtx.plus_diagonal(cal.lambda).scaled(cal.gamma),
                                   rng);
  r.diagnostics = {{"lipschitz_bound", cal.lipschitz}, {"pdp_epsilon", check}};
  internal::finish_private(r);
  return r;
}

// --- objective perturbation ------------------------------------------------

struct ObjPertConstants {
  double lambda = 0.0;
  double noise_scale = 0.0;
};

// lambda = 2 |X|^2 / eps; Z ~ N(0, s^2 I) with
// s = (|X|^2 |Theta| + |X||Y|) sqrt(8 log(2/delta)) / eps.
inline ObjPertConstants objpert_constants(const PrivacyBudget& budget, double bound_x,
                                          double bound_y, double domain_bound) {
  const double eps = budget.epsilon();
  return {2.0 * bound_x * bound_x / eps,
          (bound_x * bound_x * domain_bound + bound_x * bound_y) *
              std::sqrt(8.0 * std::log(2.0 / budget.delta())) / eps};
}

inline Vec project_to_ball(const Vec& v, double radius) {
  const double norm = v.norm();
  if (norm <= radius) return v;
  return v * (radius / norm);
}

// Objective perturbation with a caller-supplied standard-normal vector.
inline FitResult objpert_fit_with_noise(const Dataset& data, const PrivacyBudget& budget,
                                        double domain_bound, const Vec& unit_noise) {
  if (!(domain_bound > 0.0)) {
    throw std::invalid_argument("objpert_fit: domain bound must be > 0");
  }
  if (unit_noise.size() != data.d()) {
    throw std::invalid_argument("objpert_fit: noise dimension mismatch");
  }
  FitResult r = internal::start_result(Method::kObjPert, "objpert", nullptr);
  const ObjPertConstants k =
      objpert_constants(budget, data.bound_x(), data.bound_y(), domain_bound);
  const SufficientStats s = SufficientStats::of(data);
  r.lambda = k.lambda;
  const Vec unconstrained =
      ridge_solve(s.xtx, s.xty - k.noise_scale * unit_noise, k.lambda);
  r.theta = project_to_ball(unconstrained, domain_bound);
  r.ledger.record("objective", budget.epsilon(), budget.delta());
  r.diagnostics = {{"noise_scale", k.noise_scale}, {"domain_bound", domain_bound}};
  internal::finish_private(r);
  return r;
}

inline FitResult objpert_fit(const Dataset& data, const PrivacyBudget& budget,
                             double domain_bound, RngStream& rng) {
  const RngStream id = rng;
  const Vec z = rng.normal_vector(data.d());
  FitResult r = objpert_fit_with_noise(data, budget, domain_bound, z);
  r.rng_seed = id.seed();
  r.rng_stream = id.stream();
  r.rng_fingerprint = id.fingerprint();
  return r;
}

}  // namespace dp_linreg
