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
#include <string>
#include <utility>
#include <vector>

#include "dp_linreg/dataset.hpp"
#include "dp_linreg/errors.hpp"
#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

// Rescales every nonzero row to unit Euclidean norm; zero rows stay zero.
inline Mat normalize_rows(const Mat& x) {
  Mat out = x;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

// Preprocessing statistics estimated on a training split and replayed on
// held-out rows: column z-scoring, row normalization, and a target transform
// (y - mean) / (sd * scale) where scale makes max |y| = 1 on the training rows.
class Standardizer {
 public:
  // Throws DataError for n < 2 or a constant target. Zero-variance feature
  // columns are dropped with a warning; at least one column must survive.
  static Standardizer fit(const Mat& x, const Vec& y) {
    if (x.rows() < 2) throw DataError("preprocess: need at least 2 rows");
    if (y.size() != x.rows()) throw DataError("preprocess: y length mismatch");
    if (!x.allFinite() || !y.allFinite()) {
      throw DataError("preprocess: non-finite input");
    }
    Standardizer s;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double mean = x.col(j).mean();
      const double sd =
          std::sqrt((x.col(j).array() - mean).square().sum() / (n - 1.0));
      if (!(sd > 0.0)) {
        warn("preprocess: dropping zero-variance column " + std::to_string(j));
        continue;
      }
      s.columns_.push_back(j);
      s.col_mean_.push_back(mean);
      s.col_sd_.push_back(sd);
    }
    if (s.columns_.empty()) throw DataError("preprocess: every column is constant");
    s.y_mean_ = y.mean();
    s.y_sd_ = std::sqrt((y.array() - s.y_mean_).square().sum() / (n - 1.0));
    if (!(s.y_sd_ > 0.0)) throw DataError("preprocess: constant target");
    s.y_scale_ = ((y.array() - s.y_mean_) / s.y_sd_).abs().maxCoeff();
    return s;
  }

  Mat transform_x(const Mat& x) const {
    Mat z(x.rows(), static_cast<Eigen::Index>(columns_.size()));
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      const auto c = static_cast<Eigen::Index>(k);
      z.col(c) = (x.col(columns_[k]).array() - col_mean_[k]) / col_sd_[k];
    }
    return normalize_rows(z);
  }

  Vec transform_y(const Vec& y) const {
    return ((y.array() - y_mean_) / y_sd_ / y_scale_).matrix();
  }

  const std::vector<Eigen::Index>& kept_columns() const { return columns_; }

 private:
  std::vector<Eigen::Index> columns_;
  std::vector<double> col_mean_;
  std::vector<double> col_sd_;
  double y_mean_ = 0.0;
  double y_sd_ = 1.0;
  double y_scale_ = 1.0;
};

// Training-side preprocessing: bound_x = bound_y = 1.
inline Dataset preprocess(const Mat& x, const Vec& y) {
  const Standardizer s = Standardizer::fit(x, y);
  return Dataset(s.transform_x(x), s.transform_y(y), 1.0, 1.0);
}

struct SplitData {
  Dataset train;
  Mat test_x;
  Vec test_y;  // transformed but not clipped
};

inline SplitData preprocess_split(const Mat& train_x, const Vec& train_y,
                                  const Mat& test_x, const Vec& test_y) {
  const Standardizer s = Standardizer::fit(train_x, train_y);
  return {Dataset(s.transform_x(train_x), s.transform_y(train_y), 1.0, 1.0),
          s.transform_x(test_x), s.transform_y(test_y)};
}

}  // namespace dp_linreg
