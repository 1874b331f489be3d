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

#include <cstdint>
#include <random>
#include <stdexcept>

#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

namespace internal {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace internal

// A reproducible random stream identified by (seed, stream index). Two
// streams with the same pair produce the same draws; distinct indices give
// statistically independent streams, so parallel callers each take their own.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Stable identifier of the (seed, stream) pair.
  std::uint64_t fingerprint() const {
    return internal::mix64(seed_ ^ internal::mix64(stream_));
  }

  // Child stream for sub-task `index`; independent of this stream's state.
  RngStream substream(std::uint64_t index) const {
    return RngStream(seed_, internal::mix64(stream_ * 0x100000001b3ULL ^
                                            internal::mix64(index + 1)));
  }

  double normal() { return normal_(engine_); }
  double uniform01() { return uniform_(engine_); }

  Vec normal_vector(Eigen::Index d) {
    Vec z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = normal();
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = internal::mix64(seed);
    const std::uint64_t b = internal::mix64(stream ^ 0xd1b54a32d192ed03ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Symmetric d x d matrix: upper triangle (diagonal included) iid N(0, w^2),
// mirrored to the lower triangle.
inline SymMatrix sample_sym_gauss(Eigen::Index d, double w, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_sym_gauss: d must be >= 1");
  if (!(w >= 0.0)) throw std::invalid_argument("sample_sym_gauss: w must be >= 0");
  Mat upper = Mat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) upper(i, j) = w * rng.normal();
  }
  return SymMatrix::from_upper(upper);
}

// Draw from N(mean, precision^{-1}). With precision = U^T U (U upper
// triangular), theta = mean + U^{-1} z has covariance U^{-1} U^{-T}.
inline Vec sample_gauss_precision(const Vec& mean, const SymMatrix& precision,
                                  RngStream& rng) {
  if (mean.size() != precision.order()) {
    throw std::invalid_argument("sample_gauss_precision: dimension mismatch");
  }
  Eigen::LLT<Mat> llt(precision.matrix());
  if (llt.info() != Eigen::Success) {
    throw FactorizationError(
        "sample_gauss_precision: precision is not positive definite");
  }
  const Vec z = rng.normal_vector(mean.size());
  return mean + llt.matrixU().solve(z);
}

}  // namespace dp_linreg
