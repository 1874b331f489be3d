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

// Gaussian-mechanism releases composed by the private estimators.
//
// Every release takes a ReleaseParams: the epsilon and delta charged to the
// budget, plus the log factor log(1/delta') that sets the noise multiplier.
// The two are kept apart because the estimators charge delta/3 per release
// while calibrating noise with log(6/delta).

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dp_linreg/numerics.hpp"
#include "dp_linreg/random.hpp"

namespace dp_linreg {

class PrivacyBudget {
 public:
  PrivacyBudget(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw std::invalid_argument("PrivacyBudget: epsilon must be finite and > 0");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("PrivacyBudget: delta must lie in (0, 1)");
    }
  }

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  double epsilon_;
  double delta_;
};

struct ReleaseParams {
  double epsilon = 0.0;    // charged
  double delta = 0.0;      // charged
  double log_term = 0.0;   // log(1/delta') used in the noise multiplier

  // Noise calibrated with log(1/delta) for the charged delta itself.
  static ReleaseParams standard(double epsilon, double delta) {
    return checked({epsilon, delta, std::log(1.0 / delta)});
  }

  static ReleaseParams with_log_term(double epsilon, double delta,
                                     double log_term) {
    return checked({epsilon, delta, log_term});
  }

 private:
  static ReleaseParams checked(ReleaseParams p) {
    if (!(p.epsilon > 0.0)) {
      throw std::invalid_argument("release epsilon must be > 0");
    }
    if (!(p.delta > 0.0 && p.delta < 1.0)) {
      throw std::invalid_argument("release delta must lie in (0, 1)");
    }
    if (!(p.log_term > 0.0)) {
      throw std::invalid_argument("release log term must be > 0");
    }
    return p;
  }
};

struct ReleasedScalar {
  double value = 0.0;
  double epsilon_spent = 0.0;
  double delta_spent = 0.0;
  double noise_scale = 0.0;
};

struct ReleasedStats {
  SymMatrix xtx_hat;
  Vec xty_hat;
  double epsilon_spent = 0.0;
  double delta_spent = 0.0;
  double matrix_noise_scale = 0.0;
  double vector_noise_scale = 0.0;
};

// One entry per sub-release, in the order the estimator performed them.
struct LedgerEntry {
  std::string name;
  double epsilon = 0.0;
  double delta = 0.0;
};

class BudgetLedger {
 public:
  void record(std::string name, double epsilon, double delta) {
    entries_.push_back({std::move(name), epsilon, delta});
  }

  const std::vector<LedgerEntry>& entries() const { return entries_; }

  double total_epsilon() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.epsilon;
    return s;
  }

  double total_delta() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.delta;
    return s;
  }

 private:
  std::vector<LedgerEntry> entries_;
};

// Splits `total` into k parts: k-1 copies of total/k and a remainder chosen so
// that the left-to-right sum reproduces `total` (exact for k = 2 and k = 3).
inline std::vector<double> split_evenly(double total, int k) {
  if (k < 1) throw std::invalid_argument("split_evenly: k must be >= 1");
  std::vector<double> parts(static_cast<std::size_t>(k), total / k);
  double head = 0.0;
  for (int i = 0; i + 1 < k; ++i) head += parts[static_cast<std::size_t>(i)];
  parts.back() = total - head;
  return parts;
}

// --- smallest eigenvalue -------------------------------------------------

// max{lambda_min + sqrt(L)/eps * |X|^2 * z - L/eps * |X|^2, 0} with
// L = params.log_term. Sensitivity |X|^2 follows from Weyl's inequality; the
// downward shift makes the release a high-probability lower bound.
inline ReleasedScalar release_min_eigenvalue_with_draw(double lambda_min,
                                                       double bound_x,
                                                       const ReleaseParams& p,
                                                       double z) {
  if (!(lambda_min >= 0.0)) {
    throw std::invalid_argument("release_min_eigenvalue: lambda_min must be >= 0");
  }
  if (!(bound_x > 0.0)) {
    throw std::invalid_argument("release_min_eigenvalue: bound_x must be > 0");
  }
  const double sens = bound_x * bound_x;
  const double scale = std::sqrt(p.log_term) / p.epsilon * sens;
  const double shift = p.log_term / p.epsilon * sens;
  return {std::max(lambda_min + scale * z - shift, 0.0), p.epsilon, p.delta,
          scale};
}

inline ReleasedScalar release_min_eigenvalue(double lambda_min, double bound_x,
                                             const ReleaseParams& p,
                                             RngStream& rng) {
  return release_min_eigenvalue_with_draw(lambda_min, bound_x, p, rng.normal());
}

// --- log local Lipschitz constant ------------------------------------------

// Delta = log(|Y| + |X| * theta_norm) + s*sqrt(L)/eps * z + s*L/eps where
// s = log(1 + |X|^2 / lam_floor) is the local sensitivity of the log term.
// The caller forms |X| * exp(Delta), an upper bound of the local Lipschitz
// constant w.h.p.
inline ReleasedScalar release_log_lipschitz_with_draw(double theta_norm,
                                                      double bound_x,
                                                      double bound_y,
                                                      double lam_floor,
                                                      const ReleaseParams& p,
                                                      double z) {
  if (!(theta_norm >= 0.0)) {
    throw std::invalid_argument("release_log_lipschitz: theta_norm must be >= 0");
  }
  if (!(bound_x > 0.0) || !(bound_y > 0.0)) {
    throw std::invalid_argument("release_log_lipschitz: bounds must be > 0");
  }
  if (!(lam_floor > 0.0)) {
    throw std::domain_error(
        "release_log_lipschitz: lambda + lambda_min = 0 gives infinite "
        "sensitivity");
  }
  const double s = std::log1p(bound_x * bound_x / lam_floor);
  const double scale = s * std::sqrt(p.log_term) / p.epsilon;
  const double shift = s * p.log_term / p.epsilon;
  const double value = std::log(bound_y + bound_x * theta_norm) + scale * z + shift;
  return {value, p.epsilon, p.delta, scale};
}

inline ReleasedScalar release_log_lipschitz(double theta_norm, double bound_x,
                                            double bound_y, double lam_floor,
                                            const ReleaseParams& p,
                                            RngStream& rng) {
  return release_log_lipschitz_with_draw(theta_norm, bound_x, bound_y, lam_floor,
                                         p, rng.normal());
}

// --- sufficient statistics ---------------------------------------------------

inline double suff_stats_matrix_scale(double bound_x, const ReleaseParams& p) {
  return std::sqrt(p.log_term) * bound_x * bound_x / p.epsilon;
}

inline double suff_stats_vector_scale(double bound_x, double bound_y,
                                      const ReleaseParams& p) {
  return std::sqrt(p.log_term) * bound_x * bound_y / p.epsilon;
}

// xtx + w1 * unit_matrix_noise and xty + w2 * unit_vector_noise, with the
// standard-normal noise supplied by the caller.
inline ReleasedStats release_suff_stats_with_noise(
    const SymMatrix& xtx, const Vec& xty, double bound_x, double bound_y,
    const ReleaseParams& matrix_part, const ReleaseParams& vector_part,
    const SymMatrix& unit_matrix_noise, const Vec& unit_vector_noise) {
  if (!(bound_x > 0.0) || !(bound_y > 0.0)) {
    throw std::invalid_argument("release_suff_stats: bounds must be > 0");
  }
  if (xty.size() != xtx.order() || unit_vector_noise.size() != xtx.order() ||
      unit_matrix_noise.order() != xtx.order()) {
    throw std::invalid_argument("release_suff_stats: dimension mismatch");
  }
  const double w1 = suff_stats_matrix_scale(bound_x, matrix_part);
  const double w2 = suff_stats_vector_scale(bound_x, bound_y, vector_part);
  ReleasedStats out;
  out.xtx_hat = xtx + unit_matrix_noise.scaled(w1);
  out.xty_hat = xty + w2 * unit_vector_noise;
  out.epsilon_spent = matrix_part.epsilon + vector_part.epsilon;
  out.delta_spent = matrix_part.delta + vector_part.delta;
  out.matrix_noise_scale = w1;
  out.vector_noise_scale = w2;
  return out;
}

// Analyze-Gauss style release of (X^T X, X^T y): symmetric Gaussian matrix
// noise with sensitivity |X|^2 and vector noise with sensitivity |X||Y|.
inline ReleasedStats release_suff_stats(const SymMatrix& xtx, const Vec& xty,
                                        double bound_x, double bound_y,
                                        const ReleaseParams& matrix_part,
                                        const ReleaseParams& vector_part,
                                        RngStream& rng) {
  const SymMatrix e = sample_sym_gauss(xtx.order(), 1.0, rng);
  const Vec z = rng.normal_vector(xtx.order());
  return release_suff_stats_with_noise(xtx, xty, bound_x, bound_y, matrix_part,
                                       vector_part, e, z);
}

// --- per-instance privacy of one posterior sample ----------------------------

// Upper bound on the pDP epsilon of sampling from
// exp(-gamma/2 (|y - X theta|^2 + lam |theta|^2)) for local Lipschitz
// constant `lipschitz`:
//   sqrt(g L^2 log(2/d) / (lam + lmin)) + g L^2 / (2 (lam + lmin + |X|^2))
//     + (1 + log(2/d)) |X|^2 / (2 (lam + lmin)).
inline double pdp_epsilon(double gamma, double lipschitz, double lam,
                          double lambda_min, double bound_x, double delta) {
  if (!(gamma >= 0.0) || !(lipschitz >= 0.0) || !(lam >= 0.0) ||
      !(lambda_min >= 0.0)) {
    throw std::invalid_argument("pdp_epsilon: arguments must be >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("pdp_epsilon: delta must lie in (0, 1)");
  }
  const double floor = lam + lambda_min;
  if (!(floor > 0.0)) {
    throw std::domain_error("pdp_epsilon: lambda + lambda_min must be > 0");
  }
  const double log2d = std::log(2.0 / delta);
  const double gl2 = gamma * lipschitz * lipschitz;
  const double bx2 = bound_x * bound_x;
  return std::sqrt(gl2 * log2d / floor) + gl2 / (2.0 * (floor + bx2)) +
         (1.0 + log2d) * bx2 / (2.0 * floor);
}

}  // namespace dp_linreg
