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

#include "gep/linalg.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gep/errors.h"
#include "oracles.h"

namespace gep {
namespace {

using testing::LongMatrix;

double max_abs_gram_minus_identity(const DenseMatrix& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t j = 0; j < q.rows(); ++j) {
      const double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot(q.row(i), q.row(j)) - target));
    }
  }
  return worst;
}

TEST(OrthonormalizeRowsTest, AxisAligned) {
  const auto out = orthonormalize_rows(DenseMatrix{{2, 0}, {0, 3}});
  EXPECT_EQ(out.effective_rank, 2u);
  EXPECT_EQ(out.rows, (DenseMatrix{{1, 0}, {0, 1}}));
}

TEST(OrthonormalizeRowsTest, DuplicateDirectionIsDropped) {
  const auto out = orthonormalize_rows(DenseMatrix{{1, 1}, {2, 2}});
  ASSERT_EQ(out.effective_rank, 1u);
  ASSERT_EQ(out.rows.rows(), 1u);
  EXPECT_NEAR(out.rows(0, 0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out.rows(0, 1), 1 / std::sqrt(2.0), 1e-15);
}

TEST(OrthonormalizeRowsTest, RandomFullRankMatchesExtendedPrecisionProjector) {
  std::mt19937_64 gen(7);
  const DenseMatrix m = testing::random_matrix(5, 8, gen);
  const auto out = orthonormalize_rows(m);
  ASSERT_EQ(out.effective_rank, 5u);
  EXPECT_LE(max_abs_gram_minus_identity(out.rows), 1e-10);

  // Same row space: projectors QᵀQ and VVᵀ from the oracle SVD coincide.
  const LongMatrix v = testing::top_right_singular_rows(m, 5);
  const LongMatrix q = testing::to_long(out.rows);
  const LongMatrix diff = q.transpose() * q - v.transpose() * v;
  EXPECT_LE(static_cast<double>(diff.cwiseAbs().maxCoeff()), 1e-10);
}

TEST(OrthonormalizeRowsTest, ZeroRowsAreDropped) {
  const auto out = orthonormalize_rows(DenseMatrix{{0, 0, 0}, {0, 1, 0}});
  EXPECT_EQ(out.effective_rank, 1u);
}

TEST(OrthonormalizeRowsTest, RejectsNonFiniteInputAndBadTolerance) {
  DenseMatrix m{{1, std::numeric_limits<double>::quiet_NaN()}};
  EXPECT_THROW(orthonormalize_rows(m), InvalidInput);
  EXPECT_THROW(orthonormalize_rows(DenseMatrix{{1, 0}}, 0.0), InvalidInput);
}

TEST(PowerIterationBasisTest, RankOneFixedPoint) {
  std::mt19937_64 gen(1);
  const DenseMatrix u = testing::random_matrix(6, 1, gen);
  DenseMatrix v = testing::random_matrix(1, 9, gen);
  const double nv = norm(v.row(0));
  for (double& x : v.data()) x /= nv;
  const DenseMatrix ga = multiply(u, v);
  RandomStream rng(3, 0);
  const auto est = power_iteration_basis(ga, 1, 1, rng);
  ASSERT_EQ(est.rows.rows(), 1u);
  const double sign = est.rows(0, 0) * v(0, 0) > 0 ? 1.0 : -1.0;
  for (std::size_t j = 0; j < 9; ++j) {
    EXPECT_NEAR(est.rows(0, j), sign * v(0, j), 1e-12);
  }
}

TEST(PowerIterationBasisTest, ExactRankThreeIsRecovered) {
  std::mt19937_64 gen(11);
  const DenseMatrix ga = testing::random_low_rank(20, 50, 3, gen);
  RandomStream rng(5, 0);
  const auto est = power_iteration_basis(ga, 3, 10, rng);
  ASSERT_EQ(est.rows.rows(), 3u);
  const auto split = project_split(ga, est.rows);
  EXPECT_LE(frobenius_norm(split.residual), 1e-8 * frobenius_norm(ga));

  // Oracle: the same subspace as the top-3 right singular vectors.
  const LongMatrix v = testing::top_right_singular_rows(ga, 3);
  EXPECT_LE(static_cast<double>(
                testing::max_principal_angle_sine(testing::to_long(est.rows), v)),
            1e-8);
}

TEST(PowerIterationBasisTest, ConvergesToTopSubspaceWithGap) {
  // Singular gap 0.7 -> 0.5 between the 4th and 5th directions.
  std::mt19937_64 gen(23);
  const DenseMatrix ga = testing::matrix_with_singular_values(
      20, 50, {1.0, 0.9, 0.8, 0.7, 0.5, 0.45, 0.4, 0.3, 0.2, 0.1}, gen);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RandomStream rng(seed, 0);
    const auto est = power_iteration_basis(ga, 4, 200, rng);
    const LongMatrix v = testing::top_right_singular_rows(ga, 4);
    EXPECT_LE(static_cast<double>(testing::max_principal_angle_sine(
                  testing::to_long(est.rows), v)),
              1e-6);
  }
}

TEST(PowerIterationBasisTest, ZeroAnchorsGiveEmptyBasis) {
  RandomStream rng(1, 0);
  const auto est = power_iteration_basis(DenseMatrix(4, 7), 2, 3, rng);
  EXPECT_EQ(est.rows.rows(), 0u);
  EXPECT_EQ(est.rows.cols(), 7u);
}

TEST(PowerIterationBasisTest, KIsClampedWithWarning) {
  std::mt19937_64 gen(2);
  RandomStream rng(1, 0);
  const auto est = power_iteration_basis(testing::random_matrix(3, 10, gen), 8, 2, rng);
  EXPECT_EQ(est.requested_k, 3u);
  EXPECT_EQ(est.rows.rows(), 3u);
  ASSERT_EQ(est.warnings.size(), 1u);
  EXPECT_NE(est.warnings[0].find("clamped"), std::string::npos);
}

TEST(PowerIterationBasisTest, RankDeficientAnchorsShrinkK) {
  std::mt19937_64 gen(4);
  RandomStream rng(1, 0);
  const auto est = power_iteration_basis(testing::random_low_rank(10, 30, 2, gen), 5, 3, rng);
  EXPECT_EQ(est.requested_k, 5u);
  EXPECT_EQ(est.rows.rows(), 2u);
}

TEST(PowerIterationBasisTest, RejectsZeroK) {
  RandomStream rng(1, 0);
  EXPECT_THROW(power_iteration_basis(DenseMatrix(2, 2), 0, 1, rng), InvalidInput);
}

TEST(ProjectSplitTest, RowsInSpanHaveNoResidual) {
  std::mt19937_64 gen(5);
  const DenseMatrix basis = orthonormalize_rows(testing::random_matrix(3, 12, gen)).rows;
  const DenseMatrix g = multiply(testing::random_matrix(6, 3, gen), basis);
  const auto split = project_split(g, basis);
  EXPECT_LE(frobenius_norm(split.residual), 1e-10 * frobenius_norm(g));
}

TEST(ProjectSplitTest, EmptyBasisKeepsGradients) {
  const DenseMatrix g{{1, 2, 3}, {4, 5, 6}};
  const auto split = project_split(g, DenseMatrix(0, 3));
  EXPECT_EQ(split.embedding.rows(), 2u);
  EXPECT_EQ(split.embedding.cols(), 0u);
  EXPECT_EQ(split.residual, g);
}

TEST(ProjectSplitTest, OrthogonalGradients) {
  const DenseMatrix basis{{1, 0, 0}};
  const DenseMatrix g{{0, 2, 3}, {0, -1, 5}};
  const auto split = project_split(g, basis);
  EXPECT_EQ(split.embedding, (DenseMatrix{{0}, {0}}));
  EXPECT_EQ(split.residual, g);
}

TEST(ProjectSplitTest, DimensionMismatch) {
  EXPECT_THROW(project_split(DenseMatrix(2, 3), DenseMatrix{{1, 0}}), InvalidInput);
}

TEST(ProjectSplitTest, ResidualIsOrthogonalAndPythagorean) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix basis = orthonormalize_rows(testing::random_matrix(4, 15, gen)).rows;
    const DenseMatrix g = testing::random_matrix(7, 15, gen);
    const auto split = project_split(g, basis);
    const auto again = project_split(split.residual, basis);
    EXPECT_LE(frobenius_norm(again.embedding), 1e-9 * frobenius_norm(g));
    for (std::size_t i = 0; i < g.rows(); ++i) {
      const double lhs = dot(g.row(i), g.row(i));
      const double rhs = dot(split.embedding.row(i), split.embedding.row(i)) +
                         dot(split.residual.row(i), split.residual.row(i));
      EXPECT_NEAR(lhs, rhs, 1e-9 * lhs);
    }
  }
}

TEST(ClipRowsTest, Examples) {
  const DenseMatrix out = clip_rows(DenseMatrix{{3, 4}, {0.6, 0.8}, {0, 0}}, 2.0);
  EXPECT_NEAR(out(0, 0), 1.2, 1e-15);
  EXPECT_NEAR(out(0, 1), 1.6, 1e-15);
  EXPECT_EQ(out(1, 0), 0.6);
  EXPECT_EQ(out(1, 1), 0.8);
  EXPECT_EQ(out(2, 0), 0.0);
  EXPECT_EQ(out(2, 1), 0.0);
  EXPECT_THROW(clip_rows(out, 0.0), InvalidInput);
  EXPECT_THROW(clip_rows(out, -1.0), InvalidInput);
}

TEST(ClipRowsTest, OverflowingNormsAndNonFiniteRows) {
  const DenseMatrix big{{1e200, -1e200, 3e199}};
  const DenseMatrix c = clip_rows(big, 2.0);
  EXPECT_LE(norm(c.row(0)), 2.0);
  EXPECT_NEAR(norm(c.row(0)), 2.0, 1e-12);
  EXPECT_NEAR(c(0, 0) / c(0, 2), 1e200 / 3e199, 1e-12);
  const DenseMatrix bad{{1.0, std::numeric_limits<double>::quiet_NaN()}};
  EXPECT_THROW(clip_rows(bad, 1.0), InvalidInput);
}

TEST(ClipRowsTest, IsAContractionPreservingDirection) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    DenseMatrix m = testing::random_matrix(5, 9, gen);
    for (double& v : m.data()) v *= scale(gen);
    const double s = scale(gen);
    const DenseMatrix out = clip_rows(m, s);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double in_norm = norm(m.row(i));
      const double out_norm = norm(out.row(i));
      EXPECT_LE(out_norm, std::min(in_norm, s));
      // Parallel: |<x, y>| = ‖x‖‖y‖.
      EXPECT_NEAR(dot(m.row(i), out.row(i)), in_norm * out_norm,
                  1e-12 * in_norm * out_norm);
    }
  }
}

TEST(StableRankTest, Examples) {
  EXPECT_NEAR(stable_rank(DenseMatrix{{1, 2, 3}, {2, 4, 6}}), 1.0, 1e-6);
  std::mt19937_64 gen(3);
  const DenseMatrix q = orthonormalize_rows(testing::random_matrix(4, 10, gen)).rows;
  EXPECT_NEAR(stable_rank(q), 4.0, 1e-4);
  // diag(2, 1) padded with zero columns: singular values 2 and 1.
  EXPECT_NEAR(stable_rank(DenseMatrix{{2, 0, 0}, {0, 1, 0}}), 1.25, 1e-6);
  EXPECT_THROW(stable_rank(DenseMatrix(3, 3)), UndefinedValue);
}

TEST(StableRankTest, MatchesSingularValueOracleAndStaysInRange) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix m = testing::random_low_rank(12, 30, 6, gen, 0.6);
    const auto sv = testing::singular_values(m);
    const double expected = static_cast<double>(sv.squaredNorm() / (sv(0) * sv(0)));
    const double got = stable_rank(m);
    EXPECT_NEAR(got, expected, 1e-5 * expected);
    EXPECT_GE(got, 1.0);
    EXPECT_LE(got, 12.0);
  }
}

TEST(GaussianNoiseTest, ZeroSigmaIsZero) {
  RandomStream rng(1, 2);
  EXPECT_EQ(gaussian_noise(3, 4, 0.0, rng), DenseMatrix(3, 4));
  EXPECT_THROW(gaussian_noise(1, 1, -1.0, rng), InvalidInput);
}

TEST(GaussianNoiseTest, Moments) {
  RandomStream rng(42, 0);
  const DenseMatrix z = gaussian_noise(1000, 1000, 1.0, rng);
  double mean = 0.0;
  for (double v : z.data()) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(z.size() - 1);
  EXPECT_LE(std::abs(mean), 4e-3);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(GaussianNoiseTest, DeterministicPerStream) {
  RandomStream a(99, 7), b(99, 7), c(99, 8);
  const DenseMatrix za = gaussian_noise(5, 6, 2.0, a);
  EXPECT_EQ(za, gaussian_noise(5, 6, 2.0, b));
  EXPECT_NE(za, gaussian_noise(5, 6, 2.0, c));
  EXPECT_EQ(RandomStream::for_step(1, 3, 4).stream_id(),
            RandomStream::for_step(1, 3, 4).stream_id());
}

TEST(MacCounterTest, CountsProducts) {
  DenseMatrix a(4, 6), b(3, 6);
  MacCounter counter;
  multiply_abt(a, b);
  EXPECT_EQ(counter.count(), 4u * 3u * 6u);
  DenseMatrix c(4, 3);
  MacCounter counter2;
  multiply_atb(c, a);
  EXPECT_EQ(counter2.count(), 4u * 3u * 6u);
}

}  // namespace
}  // namespace gep
