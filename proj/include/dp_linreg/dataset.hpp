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
#include <stdexcept>
#include <string>
#include <utility>

#include "dp_linreg/errors.hpp"
#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

// Design matrix, response and the public domain bounds
// bound_x = sup |x| over the feature domain, bound_y = sup |y|.
class Dataset {
 public:
  static constexpr double kBoundSlack = 1e-9;

  Dataset(Mat x, Vec y, double bound_x, double bound_y)
      : x_(std::move(x)), y_(std::move(y)), bound_x_(bound_x), bound_y_(bound_y) {
    if (x_.rows() < 1 || x_.cols() < 1) {
      throw DataError("Dataset: need n >= 1 and d >= 1");
    }
    if (y_.size() != x_.rows()) {
      throw DataError("Dataset: y length does not match the number of rows");
    }
    if (!(bound_x_ > 0.0) || !std::isfinite(bound_x_) || !(bound_y_ > 0.0) ||
        !std::isfinite(bound_y_)) {
      throw DataError("Dataset: bounds must be finite and > 0");
    }
    if (!x_.allFinite() || !y_.allFinite()) {
      throw DataError("Dataset: non-finite entries");
    }
    const double max_row = x_.rowwise().norm().maxCoeff();
    if (max_row > bound_x_ * (1.0 + kBoundSlack)) {
      throw DataError("Dataset: a row norm exceeds bound_x");
    }
    if (y_.cwiseAbs().maxCoeff() > bound_y_ * (1.0 + kBoundSlack)) {
      throw DataError("Dataset: a response exceeds bound_y");
    }
  }

  const Mat& x() const { return x_; }
  const Vec& y() const { return y_; }
  double bound_x() const { return bound_x_; }
  double bound_y() const { return bound_y_; }
  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index d() const { return x_.cols(); }

 private:
  Mat x_;
  Vec y_;
  double bound_x_;
  double bound_y_;
};

// X^T X, X^T y and the smallest eigenvalue of X^T X.
struct SufficientStats {
  SymMatrix xtx;
  Vec xty;
  double lambda_min = 0.0;

  static SufficientStats of(const Dataset& data) {
    SufficientStats s;
    s.xtx = SymMatrix::gram(data.x());
    s.xty = data.x().transpose() * data.y();
    s.lambda_min = min_eigenvalue(s.xtx);
    return s;
  }
};

}  // namespace dp_linreg
