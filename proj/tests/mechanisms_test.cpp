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

#include "dp_linreg/mechanisms.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace dp_linreg {
namespace {

TEST(PrivacyBudgetTest, Validates) {
  EXPECT_NO_THROW(PrivacyBudget(1.0, 1e-6));
  EXPECT_THROW(PrivacyBudget(0.0, 1e-6), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(PrivacyBudget(INFINITY, 0.1), std::invalid_argument);
}

TEST(SplitTest, PartsSumExactly) {
  for (double total : {1.0, 0.1, 0.3, 1e-6, 7e-11, 2.0 / 3.0, 123.456}) {
    for (int k : {2, 3}) {
      const auto parts = split_evenly(total, k);
      double s = 0.0;
      for (double p : parts) s += p;
      EXPECT_EQ(s, total) << total << " " << k;
      EXPECT_NEAR(parts.front(), total / k, 1e-15 * total);
    }
  }
}

TEST(LedgerTest, Totals) {
  BudgetLedger ledger;
  const auto e = split_evenly(0.7, 3);
  const auto d = split_evenly(1e-6, 3);
  for (int i = 0; i < 3; ++i) ledger.record("r" + std::to_string(i), e[i], d[i]);
  EXPECT_EQ(ledger.total_epsilon(), 0.7);
  EXPECT_EQ(ledger.total_delta(), 1e-6);
  EXPECT_EQ(ledger.entries().size(), 3u);
}

TEST(ReleaseParamsTest, StandardUsesOwnDelta) {
  const ReleaseParams p = ReleaseParams::standard(0.5, 1e-5);
  EXPECT_DOUBLE_EQ(p.log_term, std::log(1e5));
  EXPECT_THROW(ReleaseParams::with_log_term(0.5, 1e-5, 0.0), std::invalid_argument);
}

TEST(MinEigenvalueReleaseTest, HandComputedValue) {
  const ReleaseParams p = ReleaseParams::with_log_term(1.0, 1e-3, 4.0);
  // 10 + 2 * 0.5 - 4 with |X| = 1.
  const ReleasedScalar r = release_min_eigenvalue_with_draw(10.0, 1.0, p, 0.5);
  EXPECT_DOUBLE_EQ(r.value, 7.0);
  EXPECT_DOUBLE_EQ(r.noise_scale, 2.0);
  // Sensitivity scales with |X|^2.
  const ReleasedScalar r2 = release_min_eigenvalue_with_draw(20.0, 2.0, p, 0.5);
  EXPECT_DOUBLE_EQ(r2.value, 20.0 + 8.0 * 0.5 - 16.0);
}

TEST(MinEigenvalueReleaseTest, ClampsAtZero) {
  const ReleaseParams p = ReleaseParams::with_log_term(0.1, 1e-3, 10.0);
  EXPECT_EQ(release_min_eigenvalue_with_draw(1.0, 1.0, p, -3.0).value, 0.0);
  EXPECT_THROW(release_min_eigenvalue_with_draw(-1.0, 1.0, p, 0.0), std::invalid_argument);
}

TEST(LogLipschitzReleaseTest, HandComputedValue) {
  const ReleaseParams p = ReleaseParams::with_log_term(0.5, 1e-3, 9.0);
  // s = log(1 + 1/1) = log 2; value = log(1 + 2) + s*3/0.5*z + s*9/0.5.
  const double s = std::log(2.0);
  const ReleasedScalar r = release_log_lipschitz_with_draw(2.0, 1.0, 1.0, 1.0, p, -0.25);
  EXPECT_NEAR(r.value, std::log(3.0) + s * 6.0 * -0.25 + s * 18.0, 1e-14);
  EXPECT_THROW(release_log_lipschitz_with_draw(2.0, 1.0, 1.0, 0.0, p, 0.0),
               std::domain_error);
}

TEST(SuffStatsReleaseTest, NoiseScalesAndSymmetry) {
  const ReleaseParams mp = ReleaseParams::with_log_term(0.25, 1e-6, 16.0);
  const ReleaseParams vp = ReleaseParams::with_log_term(0.5, 1e-6, 16.0);
  Mat unit(2, 2);
  unit << 1.0, 0.5, 0.5, -1.0;
  Vec z(2);
  z << 1.0, 2.0;
  const SymMatrix xtx = SymMatrix::identity(2).scaled(3.0);
  const Vec xty = Vec::Ones(2);
  const ReleasedStats r =
      release_suff_stats_with_noise(xtx, xty, 1.0, 2.0, mp, vp, SymMatrix(unit), z);
  EXPECT_DOUBLE_EQ(r.matrix_noise_scale, 4.0 / 0.25);
  EXPECT_DOUBLE_EQ(r.vector_noise_scale, 4.0 * 2.0 / 0.5);
  EXPECT_DOUBLE_EQ(r.xtx_hat(0, 1), 0.5 * 16.0);
  EXPECT_DOUBLE_EQ(r.xty_hat(1), 1.0 + 2.0 * 16.0);
  EXPECT_TRUE(r.xtx_hat.is_exactly_symmetric());
  EXPECT_DOUBLE_EQ(r.epsilon_spent, 0.75);
}

TEST(SuffStatsReleaseTest, ZeroNoiseReturnsInputs) {
  const ReleaseParams p = ReleaseParams::standard(1.0, 1e-6);
  const SymMatrix xtx = SymMatrix::identity(3);
  const Vec xty = Vec::LinSpaced(3, 1, 3);
  const ReleasedStats r = release_suff_stats_with_noise(xtx, xty, 1.0, 1.0, p, p,
                                                        SymMatrix::zero(3), Vec::Zero(3));
  EXPECT_EQ(r.xtx_hat.matrix(), xtx.matrix());
  EXPECT_EQ(r.xty_hat, xty);
}

TEST(PdpEpsilonTest, FormulaTerms) {
  const double l2 = std::log(2.0 / 1e-6);
  // gamma = 0 leaves only the curvature term.
  EXPECT_DOUBLE_EQ(pdp_epsilon(0.0, 5.0, 10.0, 0.0, 1.0, 1e-6), (1.0 + l2) / 20.0);
  const double g = 0.3;
  const double lip = 2.0;
  const double lam = 4.0;
  const double lmin = 1.0;
  const double expected = std::sqrt(g * lip * lip * l2 / 5.0) + g * lip * lip / (2.0 * 6.0) +
                          (1.0 + l2) / 10.0;
  EXPECT_NEAR(pdp_epsilon(g, lip, lam, lmin, 1.0, 1e-6), expected, 1e-15);
  EXPECT_THROW(pdp_epsilon(1.0, 1.0, 0.0, 0.0, 1.0, 1e-6), std::domain_error);
}

TEST(PdpEpsilonTest, MonotoneInGamma) {
  double prev = 0.0;
  for (double g = 0.0; g < 5.0; g += 0.25) {
    const double v = pdp_epsilon(g, 3.0, 7.0, 0.0, 1.0, 1e-5);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ReleaseTailTest, MinEigenvalueIsLowerBoundMostOfTheTime) {
  // Failure probability is P(Z > sqrt(L)) for L = log(1/delta').
  const double delta_prime = 0.01;
  const ReleaseParams p = ReleaseParams::standard(0.5, delta_prime);
  RngStream rng(123, 0);
  const int n = 20000;
  int fail = 0;
  for (int i = 0; i < n; ++i) fail += release_min_eigenvalue(3.0, 1.0, p, rng).value > 3.0;
  const double gaussian_tail = 0.5 * std::erfc(std::sqrt(p.log_term) / std::sqrt(2.0));
  EXPECT_NEAR(static_cast<double>(fail) / n, gaussian_tail,
              4.0 * std::sqrt(gaussian_tail / n) + 1e-3);
}

}  // namespace
}  // namespace dp_linreg
