// Copyright 2026 The GEP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference computations for tests. Nothing here calls into
// the kernels under test.

#ifndef GEP_TESTS_ORACLES_H_
#define GEP_TESTS_ORACLES_H_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gep/linalg.h"

namespace gep::testing {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

inline LongMatrix to_long(const DenseMatrix& m) {
  LongMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

// Top-k right singular vectors (as rows) from an extended-precision SVD.
inline LongMatrix top_right_singular_rows(const DenseMatrix& m, std::size_t k) {
  Eigen::JacobiSVD<LongMatrix> svd(to_long(m), Eigen::ComputeThinV);
  return svd.matrixV().leftCols(k).transpose();
}

inline Eigen::Matrix<long double, Eigen::Dynamic, 1> singular_values(
    const DenseMatrix& m) {
  Eigen::JacobiSVD<LongMatrix> svd(to_long(m));
  return svd.singularValues();
}

// Sine of the largest principal angle between the row spaces of two
// matrices with orthonormal rows: ‖(I - P_b) A‖₂.
inline long double max_principal_angle_sine(const LongMatrix& a,
                                            const LongMatrix& b) {
  const LongMatrix resid = a - (a * b.transpose()) * b;
  Eigen::JacobiSVD<LongMatrix> svd(resid);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0L;
}

// n x p matrix whose rows are random combinations of `rank` random
// directions with the given singular-value profile.
inline DenseMatrix random_low_rank(std::size_t n, std::size_t p,
                                   std::size_t rank, std::mt19937_64& gen,
                                   double decay = 1.0) {
  std::normal_distribution<double> nd;
  DenseMatrix left(n, rank), right(rank, p);
  for (double& v : left.data()) v = nd(gen);
  for (std::size_t r = 0; r < rank; ++r) {
    const double s = std::pow(decay, static_cast<double>(r));
    for (std::size_t j = 0; j < p; ++j) right(r, j) = s * nd(gen);
  }
  DenseMatrix out(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < rank; ++r) {
      for (std::size_t j = 0; j < p; ++j) out(i, j) += left(i, r) * right(r, j);
    }
  }
  return out;
}

// n x p matrix U diag(svals) Vᵀ with random orthonormal U and V.
inline DenseMatrix matrix_with_singular_values(std::size_t n, std::size_t p,
                                               const std::vector<double>& svals,
                                               std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  const std::size_t r = svals.size();
  Eigen::MatrixXd gu(n, r), gv(p, r);
  for (Eigen::Index i = 0; i < gu.size(); ++i) gu.data()[i] = nd(gen);
  for (Eigen::Index i = 0; i < gv.size(); ++i) gv.data()[i] = nd(gen);
  const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(gu)
                                .householderQ() * Eigen::MatrixXd::Identity(n, r);
  const Eigen::MatrixXd v = Eigen::HouseholderQR<Eigen::MatrixXd>(gv)
                                .householderQ() * Eigen::MatrixXd::Identity(p, r);
  Eigen::VectorXd s(r);
  for (std::size_t i = 0; i < r; ++i) s(i) = svals[i];
  const Eigen::MatrixXd m = u * s.asDiagonal() * v.transpose();
  DenseMatrix out(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline DenseMatrix random_matrix(std::size_t n, std::size_t p,
                                 std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  DenseMatrix out(n, p);
  for (double& v : out.data()) v = nd(gen);
  return out;
}

}  // namespace gep::testing

#endif  // GEP_TESTS_ORACLES_H_
