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

// Hyperparameter solvers for the posterior-sampling and sufficient-statistics
// estimators: budget-splitting quadratics, the adaptive ridge parameter, and
// the four (epsilon, delta) calibrations of one-posterior sampling.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dp_linreg/errors.hpp"
#include "dp_linreg/mechanisms.hpp"
#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

inline constexpr double kDefaultVarrho = 0.05;
inline constexpr double kDefaultBalancedB = 1.0;

// log(6/delta): the per-release log factor of the adaptive estimators.
inline double log6_over(double delta) { return std::log(6.0 / delta); }
inline double log2_over(double delta) { return std::log(2.0 / delta); }

// --- adaptive OPS budget ---------------------------------------------------

// How the bracket of the eps_tilde quadratic is read. kProduct follows the
// displayed (1/l) * ((1+l)/l); kSum is the (1/l) + (1+l)/l form.
enum class EpsTildeForm { kProduct, kSum };

struct AdaOpsBudget {
  double eps_bar = 0.0;
  double eps_tilde = 0.0;
};

inline double eps_bar_coefficient(double log_term) {
  return 1.0 / (2.0 * log_term);
}

inline double eps_tilde_coefficient(double log_term, EpsTildeForm form) {
  if (form == EpsTildeForm::kProduct) {
    return 0.5 * (1.0 / log_term) * ((1.0 + log_term) / log_term);
  }
  return 0.5 * (1.0 / log_term + (1.0 + log_term) / log_term);
}

// eps_bar solves eps_bar^2 / (2 l) + eps_bar - eps/4 = 0 and eps_tilde solves
// (eps_tilde^2 / 2) * bracket(l) + eps_tilde - eps/2 = 0, with l = log(6/delta)
// supplied directly.
inline AdaOpsBudget adaops_budget_from_log(
    double eps, double log_term, EpsTildeForm form = EpsTildeForm::kProduct) {
  if (!(eps > 0.0)) throw std::invalid_argument("adaops_budget: eps must be > 0");
  if (!(log_term > 0.0)) {
    throw std::invalid_argument("adaops_budget: log term must be > 0");
  }
  return {solve_positive_quadratic(eps_bar_coefficient(log_term), eps / 4.0),
          solve_positive_quadratic(eps_tilde_coefficient(log_term, form),
                                   eps / 2.0)};
}

inline AdaOpsBudget adaops_budget(double eps, double delta,
                                  EpsTildeForm form = EpsTildeForm::kProduct) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("adaops_budget: delta must lie in (0, 1)");
  }
  return adaops_budget_from_log(eps, log6_over(delta), form);
}

// Intermediate hyperparameters of one adaptive OPS fit.
struct AdaOpsParams {
  double eps_bar = 0.0;
  double eps_tilde = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double t_min = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
};

// --- utility constants -----------------------------------------------------

struct CConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// C1 = [d/2 + sqrt(d log(1/rho)) + log(1/rho)] * l / eps^2 and C2 = l / eps,
// where l is the caller's log factor (log(2/delta) or log(6/delta)).
inline CConstants c_constants(double eps, double log_term, double varrho,
                              int d) {
  if (!(eps > 0.0) || !(log_term > 0.0) || d < 1) {
    throw std::invalid_argument("c_constants: eps, log term and d must be > 0");
  }
  if (!(varrho > 0.0 && varrho <= 1.0)) {
    throw std::invalid_argument("c_constants: varrho must lie in (0, 1]");
  }
  const double lr = std::log(1.0 / varrho);
  const double dd = static_cast<double>(d);
  return {(dd / 2.0 + std::sqrt(dd * lr) + lr) * log_term / (eps * eps),
          log_term / eps};
}

// --- adaptive ridge parameter --------------------------------------------

// |X|^4 C1 (1 + |X|^2 / s)^{2 C2} / s + t with s = t + tilde_lmin, evaluated in
// log space so large exponents overflow to +inf rather than NaN.
inline double adaops_lambda_objective(double t, double tilde_lmin,
                                      double bound_x, double c1, double c2) {
  const double s = t + tilde_lmin;
  if (c1 == 0.0) return t;
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  const double bx2 = bound_x * bound_x;
  const double log_first = std::log(bx2 * bx2 * c1) +
                           2.0 * c2 * std::log1p(bx2 / s) - std::log(s);
  return std::exp(log_first) + t;
}

inline double adaops_t_min(double tilde_lmin, double bound_x, double eps,
                           double log_term) {
  const double bx2 = bound_x * bound_x;
  return std::max(bx2 * (1.0 + log_term) / (2.0 * eps) - tilde_lmin, 0.0);
}

namespace internal {

// Bisection in log(x) for the root of a strictly decreasing function with
// phi(lo) > 0 and phi(hi) <= 0. Returns the upper end of the final bracket.
template <typename Phi>
double log_bisect_decreasing(Phi phi, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if (!(mid > lo && mid < hi)) break;
    if (phi(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi / lo - 1.0 < 1e-15) break;
  }
  return hi;
}

// Grows `hi` geometrically until phi(hi) <= 0.
template <typename Phi>
double grow_until_nonpositive(Phi phi, double start) {
  double hi = start;
  for (int it = 0; it < 4000 && phi(hi) > 0.0; ++it) hi *= 2.0;
  if (phi(hi) > 0.0) {
    throw std::runtime_error("bracket search did not terminate");
  }
  return hi;
}

}  // namespace internal

// argmin over t >= t_min of adaops_lambda_objective.
//
// The first term is strictly decreasing and convex in t and the second is t,
// so the objective is unimodal and its derivative 1 - |X|^4 C1 h(s) is
// increasing. The root of log(|X|^4 C1 h(s)) is found by bisection in log s;
// working with the log of the derivative keeps (1 + |X|^2/s)^{2 C2} from
// overflowing for the large C2 of small epsilon.
inline double adaops_choose_lambda(double tilde_lmin, double bound_x, double c1,
                                   double c2, double t_min) {
  if (!(tilde_lmin >= 0.0) || !(bound_x > 0.0) || !(c1 >= 0.0) ||
      !(c2 >= 0.0) || !(t_min >= 0.0)) {
    throw std::invalid_argument("adaops_choose_lambda: invalid arguments");
  }
  if (c1 == 0.0) return t_min;
  const double bx2 = bound_x * bound_x;
  const double k = 2.0 * c2;
  const double log_a = std::log(bx2 * bx2 * c1);
  // log(-d/ds of the first term); positive means the objective still decreases.
  auto phi = [&](double s) {
    return log_a + k * std::log1p(bx2 / s) - 2.0 * std::log(s) +
           std::log1p(k * bx2 / (s + bx2));
  };
  const double s_floor = t_min + tilde_lmin;
  if (s_floor > 0.0 && phi(s_floor) <= 0.0) return t_min;
  double lo = s_floor > 0.0 ? s_floor : std::numeric_limits<double>::min();
  if (phi(lo) <= 0.0) return t_min;
  const double hi = internal::grow_until_nonpositive(phi, std::max(lo, 1.0));
  if (hi > lo * 2.0) lo = std::max(lo, hi / 2.0);
  const double s_star = internal::log_bisect_decreasing(phi, lo, hi);
  return std::max(t_min, s_star - tilde_lmin);
}

// lambda = max{0, sqrt(d l log(2 d^2 / rho)) |X|^2 / eps_part - tilde_lmin}.
inline double adassp_lambda(double tilde_lmin, double bound_x, int d,
                            double log_term, double varrho, double eps_part) {
  const double dd = static_cast<double>(d);
  const double level = std::sqrt(dd * log_term * std::log(2.0 * dd * dd / varrho)) *
                       bound_x * bound_x / eps_part;
  return std::max(0.0, level - tilde_lmin);
}

// --- (epsilon, delta) calibration of one-posterior sampling -----------------

enum class OpsVariant { kDiffuse, kConcentrated, kBalanced, kConservative };

inline std::string_view to_string(OpsVariant v) {
  switch (v) {
    case OpsVariant::kDiffuse: return "diffuse";
    case OpsVariant::kConcentrated: return "concentrated";
    case OpsVariant::kBalanced: return "balanced";
    case OpsVariant::kConservative: return "conservative";
  }
  return "unknown";
}

inline std::optional<OpsVariant> parse_ops_variant(std::string_view s) {
  if (s == "diffuse") return OpsVariant::kDiffuse;
  if (s == "concentrated") return OpsVariant::kConcentrated;
  if (s == "balanced") return OpsVariant::kBalanced;
  if (s == "conservative") return OpsVariant::kConservative;
  return std::nullopt;
}

struct OpsStrategy {
  OpsVariant variant = OpsVariant::kBalanced;
  double b = kDefaultBalancedB;  // assumed bound on |theta*| (balanced only)

  void validate() const {
    if (variant == OpsVariant::kBalanced && !(b > 0.0)) {
      throw std::invalid_argument("OpsStrategy: balanced needs B > 0");
    }
  }
};

struct OpsCalibration {
  double lambda = 0.0;
  double gamma = 0.0;
  double lipschitz = 0.0;  // L(lambda)
  double pdp_epsilon = 0.0;
};

// Data-independent bound on the local Lipschitz constant at the ridge
// solution: |X||Y| (sqrt(n) |X| / sqrt(2 lambda) + 1).
inline double ops_lipschitz_bound(double lambda, double n, double bound_x,
                                  double bound_y) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ops_lipschitz_bound: lambda must be > 0");
  }
  return bound_x * bound_y * (std::sqrt(n) * bound_x / std::sqrt(2.0 * lambda) + 1.0);
}

// Largest gamma with pdp_epsilon(gamma, L(lambda), lambda, 0, |X|, delta) <= eps.
// The constraint is a quadratic in sqrt(gamma).
inline double ops_gamma_for_lambda(double lambda, double eps, double delta,
                                   double n, double bound_x, double bound_y) {
  const double l2 = log2_over(delta);
  const double bx2 = bound_x * bound_x;
  const double lip = ops_lipschitz_bound(lambda, n, bound_x, bound_y);
  const double fixed = (1.0 + l2) * bx2 / (2.0 * lambda);
  const double slack = eps - fixed;
  if (!(slack > 0.0)) {
    throw InfeasibleBudgetError(
        "ops calibration: lambda too small for the requested epsilon");
  }
  const double lin = std::sqrt(lip * lip * l2 / lambda);
  const double quad = lip * lip / (2.0 * (lambda + bx2));
  const double root = 2.0 * slack / (lin + std::sqrt(lin * lin + 4.0 * quad * slack));
  return root * root;
}

inline double ops_lambda_floor(double eps, double delta, double bound_x) {
  return (1.0 + log2_over(delta)) * bound_x * bound_x / eps;
}

// Suboptimality bound C1 L(lambda)^2 / lambda + lambda B^2.
inline double ops_balanced_objective(double lambda, double c1, double n,
                                     double bound_x, double bound_y, double b) {
  const double lip = ops_lipschitz_bound(lambda, n, bound_x, bound_y);
  return c1 * lip * lip / lambda + lambda * b * b;
}

// C1 evaluated at min(eps, sqrt(eps)) with the log(2/delta) convention.
inline double ops_c1(double eps, double delta, double varrho, int d) {
  return c_constants(std::min(eps, std::sqrt(eps)), log2_over(delta), varrho, d).c1;
}

inline double ops_balanced_lambda(double eps, double delta, double n, double bound_x,
                                  double bound_y, int d, double varrho, double b) {
  const double c1 = ops_c1(eps, delta, varrho, d);
  const double floor = ops_lambda_floor(eps, delta, bound_x);
  const double bx2 = bound_x * bound_x;
  const double kxy = c1 * bx2 * bound_y * bound_y;
  const double root_n = std::sqrt(n);
  // Negative derivative of the first term: C1 |X|^2 |Y|^2 times
  // n|X|^2/l^3 + 3 sqrt(n)|X| / (sqrt(2) l^2.5) + 1/l^2. The objective
  // derivative b^2 - that is increasing; phi = log(that / b^2).
  auto phi = [&](double l) {
    const double g = n * bx2 / (l * l * l) +
                     3.0 * root_n * bound_x / (std::sqrt(2.0) * l * l * std::sqrt(l)) +
                     1.0 / (l * l);
    return std::log(kxy * g) - 2.0 * std::log(b);
  };
  if (phi(floor) <= 0.0) return floor;
  const double hi = internal::grow_until_nonpositive(phi, floor);
  return internal::log_bisect_decreasing(phi, std::max(floor, hi / 2.0), hi);
}

// Minimizer of C1 |X|^4 / lambda + lambda: relaxing |theta*_lambda| <= |theta*|
// factors (|Y|/|X| + |theta*|)^2 out of the bound, leaving no dependence on B.
inline double ops_conservative_lambda(double eps, double delta, double bound_x,
                                      int d, double varrho) {
  const double c1 = ops_c1(eps, delta, varrho, d);
  return std::max(ops_lambda_floor(eps, delta, bound_x),
                  bound_x * bound_x * std::sqrt(c1));
}

inline double ops_concentrated_lambda(double eps, double delta, double n,
                                      double bound_x, double bound_y) {
  auto excess = [&](double lambda) {
    const double lip = ops_lipschitz_bound(lambda, n, bound_x, bound_y);
    return pdp_epsilon(1.0, lip, lambda, 0.0, bound_x, delta) - eps;
  };
  const double lo = ops_lambda_floor(eps, delta, bound_x) / 2.0;
  constexpr double kHi = 1e12;
  if (excess(kHi) > 0.0) {
    throw InfeasibleBudgetError(
        "ops concentrated: no lambda in the search bracket meets epsilon at "
        "gamma = 1");
  }
  return internal::log_bisect_decreasing(excess, lo, kHi);
}

inline OpsCalibration ops_calibrate(const OpsStrategy& strategy, double eps,
                                    double delta, double n, double bound_x,
                                    double bound_y, int d,
                                    double varrho = kDefaultVarrho) {
  strategy.validate();
  if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0) || !(n >= 1.0) ||
      !(bound_x > 0.0) || !(bound_y > 0.0) || d < 1) {
    throw std::invalid_argument("ops_calibrate: invalid arguments");
  }
  OpsCalibration out;
  switch (strategy.variant) {
    case OpsVariant::kDiffuse:
      out.lambda = ops_lambda_floor(eps, delta, bound_x);
      out.gamma = ops_gamma_for_lambda(out.lambda, eps, delta, n, bound_x, bound_y);
      break;
    case OpsVariant::kConcentrated:
      out.lambda = ops_concentrated_lambda(eps, delta, n, bound_x, bound_y);
      out.gamma = 1.0;
      break;
    case OpsVariant::kBalanced:
      out.lambda = ops_balanced_lambda(eps, delta, n, bound_x, bound_y, d, varrho,
                                       strategy.b);
      out.gamma = ops_gamma_for_lambda(out.lambda, eps, delta, n, bound_x, bound_y);
      break;
    case OpsVariant::kConservative:
      out.lambda = ops_conservative_lambda(eps, delta, bound_x, d, varrho);
      out.gamma = ops_gamma_for_lambda(out.lambda, eps, delta, n, bound_x, bound_y);
      break;
  }
  out.lipschitz = ops_lipschitz_bound(out.lambda, n, bound_x, bound_y);
  out.pdp_epsilon = pdp_epsilon(out.gamma, out.lipschitz, out.lambda, 0.0, bound_x,
                                delta);
  return out;
}

// Closed-form balanced choice for a data set with |theta*| ~ B:
// lambda = (C1(eps) |X|^4 |Y|^2 n / B^2)^{1/3},
// gamma = eps^2 lambda / (4 log(2/delta) L(lambda)^2).
inline OpsCalibration ops_balanced_closed_form(double eps, double delta, double n,
                                               double bound_x, double bound_y,
                                               int d, double varrho, double b) {
  const double c1 = c_constants(eps, log2_over(delta), varrho, d).c1;
  const double bx2 = bound_x * bound_x;
  OpsCalibration out;
  out.lambda = std::cbrt(c1 * bx2 * bx2 * bound_y * bound_y * n / (b * b));
  out.lipschitz = ops_lipschitz_bound(out.lambda, n, bound_x, bound_y);
  out.gamma = eps * eps * out.lambda /
              (4.0 * log2_over(delta) * out.lipschitz * out.lipschitz);
  out.pdp_epsilon = pdp_epsilon(out.gamma, out.lipschitz, out.lambda, 0.0, bound_x,
                                delta);
  return out;
}

}  // namespace dp_linreg
