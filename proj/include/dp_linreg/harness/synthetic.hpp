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

#include <optional>
#include <stdexcept>

#include "dp_linreg/dataset.hpp"
#include "dp_linreg/harness/preprocess.hpp"
#include "dp_linreg/random.hpp"

namespace dp_linreg {

struct SyntheticSpec {
  Eigen::Index n = 1000;
  Eigen::Index d = 10;
  double sigma = 1.0;
  std::optional<Vec> theta0;  // drawn from U[0, 1]^d when empty

  void validate() const {
    if (d < 1 || n < d) throw std::invalid_argument("SyntheticSpec: need n >= d >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("SyntheticSpec: sigma must be >= 0");
    if (theta0 && theta0->size() != d) {
      throw std::invalid_argument("SyntheticSpec: theta0 has the wrong length");
    }
  }
};

struct SyntheticData {
  Dataset data;
  Vec theta0;
};

// Gaussian rows normalized to unit norm, y = X theta0 + sigma * noise.
// bound_x = 1 and bound_y is the observed max |y|.
inline SyntheticData synth_linear_gaussian(const SyntheticSpec& spec, RngStream& rng) {
  spec.validate();
  Vec theta0;
  if (spec.theta0) {
    theta0 = *spec.theta0;
  } else {
    theta0.resize(spec.d);
    for (Eigen::Index j = 0; j < spec.d; ++j) theta0(j) = rng.uniform01();
  }
  Mat x(spec.n, spec.d);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.d; ++j) x(i, j) = rng.normal();
  }
  x = normalize_rows(x);
  Vec y = x * theta0;
  if (spec.sigma > 0.0) {
    for (Eigen::Index i = 0; i < spec.n; ++i) y(i) += spec.sigma * rng.normal();
  }
  const double max_y = y.cwiseAbs().maxCoeff();
  const double bound_y = max_y > 0.0 ? max_y : 1.0;
  return {Dataset(std::move(x), std::move(y), 1.0, bound_y), std::move(theta0)};
}

}  // namespace dp_linreg
