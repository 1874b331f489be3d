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

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dp_linreg/errors.hpp"

namespace dp_linreg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Systems whose reciprocal condition estimate falls below this are treated
// as singular.
inline constexpr double kSingularRcond = 1e-14;

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw std::domain_error(std::string(what) + " has non-finite entries");
  }
}

// A dense symmetric matrix whose entries satisfy a(i,j) == a(j,i) bit-exactly.
class SymMatrix {
 public:
  SymMatrix() = default;

  // Throws std::invalid_argument unless `m` is square, non-empty and exactly
  // symmetric.
  explicit SymMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      throw std::invalid_argument("SymMatrix needs a non-empty square matrix");
    }
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      for (Eigen::Index i = j + 1; i < m_.rows(); ++i) {
        if (m_(i, j) != m_(j, i)) {
          throw std::invalid_argument("SymMatrix input is not symmetric");
        }
      }
    }
  }

  // Keeps the upper triangle (diagonal included) and mirrors it downwards.
  static SymMatrix from_upper(const Mat& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw std::invalid_argument("SymMatrix needs a non-empty square matrix");
    }
    Mat out = m.triangularView<Eigen::Upper>();
    const Mat upper = out;
    out.triangularView<Eigen::StrictlyLower>() = upper.transpose();
    return SymMatrix(Trusted{}, std::move(out));
  }

  // X^T X for an n x d design.
  static SymMatrix gram(const Mat& x) {
    if (x.cols() == 0) throw std::invalid_argument("gram of an empty design");
    Mat out = Mat::Zero(x.cols(), x.cols());
    out.selfadjointView<Eigen::Upper>().rankUpdate(x.transpose());
    const Mat upper = out;
    out.triangularView<Eigen::StrictlyLower>() = upper.transpose();
    return SymMatrix(Trusted{}, std::move(out));
  }

  static SymMatrix identity(Eigen::Index d) {
    return SymMatrix(Trusted{}, Mat::Identity(d, d));
  }

  static SymMatrix zero(Eigen::Index d) {
    return SymMatrix(Trusted{}, Mat::Zero(d, d));
  }

  Eigen::Index order() const { return m_.rows(); }
  const Mat& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix plus_diagonal(double c) const {
    Mat out = m_;
    out.diagonal().array() += c;
    return SymMatrix(Trusted{}, std::move(out));
  }

  SymMatrix scaled(double c) const {
    return SymMatrix(Trusted{}, m_ * c);
  }

  // Elementwise sums and scalings preserve exact symmetry.
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    if (a.order() != b.order()) {
      throw std::invalid_argument("SymMatrix order mismatch");
    }
    return SymMatrix(Trusted{}, a.m_ + b.m_);
  }

  bool is_exactly_symmetric() const { return m_ == m_.transpose(); }

 private:
  struct Trusted {};
  SymMatrix(Trusted, Mat m) : m_(std::move(m)) {}

  Mat m_;
};

// Eigenvalues in ascending order.
inline Vec eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Smallest eigenvalue of a PSD matrix; negative round-off is clamped to 0.
inline double min_eigenvalue(const SymMatrix& xtx) {
  return std::max(0.0, eigenvalues(xtx)(0));
}

inline bool is_positive_definite(const SymMatrix& a) {
  Eigen::LLT<Mat> llt(a.matrix());
  return llt.info() == Eigen::Success && llt.rcond() > kSingularRcond;
}

// Minimum-norm solution of a x = b through the symmetric eigendecomposition.
// Eigenvalues with |mu| <= d * eps * max|mu| are treated as zero, so for an
// invertible (possibly indefinite) matrix this is the exact inverse.
inline Vec pinv_solve(const SymMatrix& a, const Vec& b) {
  if (b.size() != a.order()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix());
  const Vec& mu = es.eigenvalues();
  const double cutoff = static_cast<double>(a.order()) *
                        std::numeric_limits<double>::epsilon() *
                        mu.cwiseAbs().maxCoeff();
  Vec coeffs = es.eigenvectors().transpose() * b;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    coeffs(i) = std::abs(mu(i)) > cutoff ? coeffs(i) / mu(i) : 0.0;
  }
  return es.eigenvectors() * coeffs;
}

// Solves (xtx + lambda I) theta = xty.
//
// SPD systems go through Cholesky. A system that is symmetric but indefinite
// (a noisy Gram matrix) is still solved exactly when it is invertible; only a
// numerically singular system raises SingularSystemError.
inline Vec ridge_solve(const SymMatrix& xtx, const Vec& xty, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("ridge_solve: lambda must be finite and >= 0");
  }
  if (xty.size() != xtx.order()) {
    throw std::invalid_argument("ridge_solve: dimension mismatch");
  }
  const SymMatrix h = xtx.plus_diagonal(lambda);
  Eigen::LLT<Mat> llt(h.matrix());
  if (llt.info() == Eigen::Success && llt.rcond() > kSingularRcond) {
    return llt.solve(xty);
  }
  const Vec mu = eigenvalues(h);
  const double scale = mu.cwiseAbs().maxCoeff();
  const double smallest = mu.cwiseAbs().minCoeff();
  if (!(scale > 0.0) || smallest <= kSingularRcond * scale) {
    throw SingularSystemError("ridge_solve: system is numerically singular");
  }
  return pinv_solve(h, xty);
}

// Positive root of a x^2 + x - b = 0 for a >= 0, b > 0. Written as
// 2b / (1 + sqrt(1 + 4ab)) so that a -> 0 is exact and cancellation free.
inline double solve_positive_quadratic(double a, double b) {
  if (!(a >= 0.0) || !(b > 0.0)) {
    throw std::invalid_argument(
        "solve_positive_quadratic: need a >= 0 and b > 0");
  }
  return 2.0 * b / (1.0 + std::sqrt(1.0 + 4.0 * a * b));
}

}  // namespace dp_linreg
