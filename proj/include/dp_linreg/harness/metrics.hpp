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

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dp_linreg/dataset.hpp"
#include "dp_linreg/errors.hpp"
#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

// Least-squares solution; the minimum-norm one when X is rank deficient.
inline Vec least_squares(const SymMatrix& xtx, const Vec& xty) {
  try {
    return ridge_solve(xtx, xty, 0.0);
  } catch (const SingularSystemError&) {
    return pinv_solve(xtx, xty);
  }
}

struct OptimizationError {
  double value = 0.0;      // the reported error (quadratic form)
  double direct = 0.0;     // F(theta) - F(theta*)
  double quadratic = 0.0;  // (1/2) (theta - theta*)^T X^T X (theta - theta*)
};

inline double half_sq_loss(const Mat& x, const Vec& y, const Vec& theta) {
  return 0.5 * (y - x * theta).squaredNorm();
}

// Allowed gap between the two paths: relative 1e-8 plus the rounding error of
// the direct path, which subtracts two losses of size F(theta*).
inline double optimization_error_tolerance(double quadratic, double f_theta,
                                           double f_star) {
  return 1e-8 * quadratic +
         64.0 * std::numeric_limits<double>::epsilon() * (f_theta + f_star);
}

// F(theta) - F(theta*) for F = (1/2)|y - X theta|^2, computed directly and as
// (1/2)|theta - theta*|^2 in the X^T X norm. Throws std::logic_error when the
// two disagree beyond optimization_error_tolerance.
inline OptimizationError optimization_error(const Dataset& data, const Vec& theta) {
  if (theta.size() != data.d()) {
    throw std::invalid_argument("optimization_error: dimension mismatch");
  }
  const SymMatrix xtx = SymMatrix::gram(data.x());
  const Vec star = least_squares(xtx, data.x().transpose() * data.y());
  const double f_theta = half_sq_loss(data.x(), data.y(), theta);
  const double f_star = half_sq_loss(data.x(), data.y(), star);
  const Vec diff = theta - star;
  OptimizationError out;
  out.direct = f_theta - f_star;
  out.quadratic = 0.5 * diff.dot(xtx.matrix() * diff);
  out.value = out.quadratic;
  if (std::abs(out.direct - out.quadratic) >
      optimization_error_tolerance(out.quadratic, f_theta, f_star)) {
    throw std::logic_error("optimization_error: direct and quadratic paths disagree");
  }
  return out;
}

inline double trace_of_inverse(const SymMatrix& xtx) {
  Eigen::LLT<Mat> llt(xtx.matrix());
  if (llt.info() != Eigen::Success || !(llt.rcond() > kSingularRcond)) {
    throw SingularSystemError("trace_of_inverse: X^T X is singular");
  }
  return llt.solve(Mat::Identity(xtx.order(), xtx.order())).trace();
}

struct EstimationMetrics {
  double mse = 0.0;
  double rel_efficiency = 0.0;
};

// |theta - theta0|^2 and its ratio to the MLE risk sigma^2 tr[(X^T X)^{-1}].
inline EstimationMetrics estimation_metrics(const Vec& theta, const Vec& theta0,
                                            const SymMatrix& xtx, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("estimation_metrics: sigma must be > 0");
  EstimationMetrics m;
  m.mse = (theta - theta0).squaredNorm();
  m.rel_efficiency = m.mse / (sigma * sigma * trace_of_inverse(xtx));
  return m;
}

// Mean squared prediction error on held-out rows.
inline double test_mse(const Mat& x, const Vec& y, const Vec& theta) {
  if (x.rows() == 0) throw std::invalid_argument("test_mse: empty test set");
  return (y - x * theta).squaredNorm() / static_cast<double>(x.rows());
}

}  // namespace dp_linreg
