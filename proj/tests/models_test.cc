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

#include "gep/models.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gep/errors.h"
#include "oracles.h"

namespace gep {
namespace {

Dataset random_dataset(std::size_t n, std::size_t d, std::size_t classes,
                       std::mt19937_64& gen) {
  Dataset data;
  data.features = testing::random_matrix(n, d, gen);
  std::uniform_int_distribution<std::size_t> label(0, classes - 1);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < n; ++i) {
    data.labels.push_back(classes == 0 ? nd(gen) : static_cast<double>(label(gen)));
  }
  data.name = "random";
  return data;
}

// Central differences of the mean loss, h = 1e-5.
Vector numeric_gradient(ModelSpec model, const Dataset& data) {
  const double h = 1e-5;
  Vector out(model.num_params());
  for (std::size_t j = 0; j < model.num_params(); ++j) {
    const double saved = model.params()[j];
    model.params()[j] = saved + h;
    const double up = mean_loss(model, data);
    model.params()[j] = saved - h;
    const double down = mean_loss(model, data);
    model.params()[j] = saved;
    out[j] = (up - down) / (2 * h);
  }
  return out;
}

TEST(PerSampleGradientsTest, LinearAtOriginIsScaledFeature) {
  const ModelSpec model = ModelSpec::linear(3);
  Dataset data{DenseMatrix{{1.0, -2.0, 0.5}}, {3.0}, "one"};
  const DenseMatrix g = per_sample_gradients(model, data);
  EXPECT_EQ(g, (DenseMatrix{{-3.0, 6.0, -1.5, -3.0}}));
}

struct ModelCase {
  const char* name;
  ModelSpec model;
  std::size_t classes;  // 0 for regression
};

class GradientCheckTest : public ::testing::TestWithParam<int> {};

std::vector<ModelCase> model_cases() {
  return {
      {"linear", ModelSpec::linear(4), 0},
      {"logistic-binary", ModelSpec::logistic(4, 2), 2},
      {"softmax", ModelSpec::logistic(4, 3), 3},
      {"mlp", ModelSpec::mlp(4, {5}, 3), 3},
      {"mlp-binary-deep", ModelSpec::mlp(4, {5, 3}, 2), 2},
  };
}

TEST_P(GradientCheckTest, MatchesFiniteDifferences) {
  ModelCase c = model_cases()[GetParam()];
  std::mt19937_64 gen(100 + GetParam());
  const Dataset data = random_dataset(6, 4, c.classes, gen);
  for (int point = 0; point < 10; ++point) {
    RandomStream rng(point, GetParam());
    c.model.init_random(rng, 1.5);
    for (double& b : c.model.params()) b += 0.1 * rng.normal();
    const DenseMatrix rows = per_sample_gradients(c.model, data);
    Vector mean = column_sums(rows);
    for (double& v : mean) v /= static_cast<double>(data.size());
    const Vector numeric = numeric_gradient(c.model, data);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      EXPECT_NEAR(mean[j], numeric[j], 1e-5 + 1e-4 * std::abs(numeric[j]))
          << c.name << " point " << point << " coordinate " << j;
    }
    const Vector batch = batch_gradient(c.model, data);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      EXPECT_NEAR(batch[j], mean[j], 1e-12 * std::max(1.0, std::abs(mean[j])));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GradientCheckTest, ::testing::Range(0, 5));

TEST(PerSampleGradientsTest, DuplicatedSampleGivesIdenticalRows) {
  ModelSpec model = ModelSpec::mlp(3, {4}, 2);
  RandomStream rng(1, 1);
  model.init_random(rng);
  Dataset data{DenseMatrix{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, {1, 1, 1}}, {1, 1, 0}, "dup"};
  const DenseMatrix g = per_sample_gradients(model, data);
  for (std::size_t j = 0; j < g.cols(); ++j) EXPECT_EQ(g(0, j), g(1, j));
}

TEST(PerSampleGradientsTest, Errors) {
  const ModelSpec model = ModelSpec::logistic(2, 2);
  EXPECT_THROW(per_sample_gradients(model, Dataset{DenseMatrix(0, 2), {}, "e"}), InvalidInput);
  EXPECT_THROW(per_sample_gradients(model, Dataset{DenseMatrix{{1, 2, 3}}, {0}, "d"}),
               InvalidInput);
  EXPECT_THROW(per_sample_gradients(model, Dataset{DenseMatrix{{1, 2}}, {2}, "l"}),
               InvalidInput);
}

TEST(EvaluateTest, SymmetricStartIsLogTwo) {
  std::mt19937_64 gen(3);
  const Dataset data = random_dataset(20, 5, 2, gen);
  EXPECT_NEAR(evaluate(ModelSpec::logistic(5, 2), data).loss, std::log(2.0), 1e-15);
}

TEST(EvaluateTest, FittedSeparableModelIsPerfect) {
  std::mt19937_64 gen(4);
  Dataset data;
  data.features = testing::random_matrix(200, 3, gen);
  const double w[3] = {1.0, -2.0, 0.5};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = w[0] * data.features(i, 0) + w[1] * data.features(i, 1) +
                     w[2] * data.features(i, 2);
    data.labels.push_back(s > 0 ? 1.0 : 0.0);
  }
  ModelSpec model = ModelSpec::logistic(3, 2);
  model.set_params({100 * w[0], 100 * w[1], 100 * w[2], 0.0});
  EXPECT_EQ(evaluate(model, data).accuracy, 1.0);
}

TEST(EvaluateTest, RandomLabelsGiveChanceAccuracy) {
  std::mt19937_64 gen(5);
  const Dataset data = random_dataset(10000, 6, 10, gen);
  ModelSpec model = ModelSpec::mlp(6, {8}, 10);
  RandomStream rng(2, 2);
  model.init_random(rng);
  // Binomial sd at p = 0.1, n = 1e4 is 0.003; 0.02 is > 6 sd.
  EXPECT_NEAR(evaluate(model, data).accuracy, 0.1, 0.02);
}

TEST(EvaluateTest, RegressionAccuracyIsNotApplicable) {
  std::mt19937_64 gen(6);
  const Dataset data = random_dataset(5, 2, 0, gen);
  EXPECT_TRUE(std::isnan(evaluate(ModelSpec::linear(2), data).accuracy));
  EXPECT_THROW(evaluate(ModelSpec::linear(2), Dataset{DenseMatrix(0, 2), {}, "e"}),
               InvalidInput);
}

TEST(GroupLayoutTest, SingleGroupGetsAllOfK) {
  const GroupLayout layout = make_group_layout(ModelSpec::logistic(10, 3), 7);
  ASSERT_EQ(layout.groups.size(), 1u);
  EXPECT_EQ(layout.groups[0].k, 7u);
  EXPECT_EQ(layout.groups[0].length, 33u);
}

TEST(GroupLayoutTest, SquareRootAllocation) {
  // sqrt weights 2:1.
  const GroupLayout layout =
      allocate_basis({{"a", 0, 400, 0}, {"b", 400, 100, 0}}, 3);
  EXPECT_EQ(layout.groups[0].k, 2u);
  EXPECT_EQ(layout.groups[1].k, 1u);
}

TEST(GroupLayoutTest, MlpBlocksPartitionParametersAndK) {
  const ModelSpec model = ModelSpec::mlp(20, {16, 8}, 4);
  const GroupLayout layout = make_group_layout(model, 30);
  ASSERT_EQ(layout.groups.size(), 3u);
  EXPECT_EQ(layout.total_k(), 30u);
  std::size_t offset = 0;
  for (const auto& g : layout.groups) {
    EXPECT_EQ(g.offset, offset);
    EXPECT_GE(g.k, 1u);
    offset += g.length;
  }
  EXPECT_EQ(offset, model.num_params());
}

TEST(GroupLayoutTest, EveryGroupGetsOneAndCapsMoveSurplus) {
  // Tiny group would round to zero.
  const GroupLayout tiny = allocate_basis({{"big", 0, 10000, 0}, {"small", 10000, 1, 0}}, 5);
  EXPECT_EQ(tiny.groups[1].k, 1u);
  EXPECT_EQ(tiny.total_k(), 5u);
  // Cap by m = 3 moves surplus to the other group.
  const GroupLayout capped = allocate_basis({{"a", 0, 900, 0}, {"b", 900, 100, 0}}, 8, 5);
  EXPECT_EQ(capped.groups[0].k, 5u);
  EXPECT_EQ(capped.groups[1].k, 3u);
  // Length caps.
  const GroupLayout len = allocate_basis({{"a", 0, 2, 0}, {"b", 2, 2, 0}}, 6);
  EXPECT_EQ(len.total_k(), 4u);
  EXPECT_THROW(allocate_basis({{"a", 0, 5, 0}, {"b", 5, 5, 0}}, 1), InvalidInput);
}

TEST(GroupLayoutTest, EvenLayout) {
  const GroupLayout layout = make_even_layout(1000, 20, 5);
  ASSERT_EQ(layout.groups.size(), 5u);
  for (const auto& g : layout.groups) {
    EXPECT_EQ(g.length, 200u);
    EXPECT_EQ(g.k, 4u);
  }
}

TEST(GroupLayoutTest, AllocationPropertiesOnRandomShapes) {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<std::size_t> len(1, 5000), count(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ParamGroup> groups;
    std::size_t off = 0;
    const std::size_t c = count(gen);
    for (std::size_t g = 0; g < c; ++g) {
      const std::size_t l = len(gen);
      groups.push_back({"g", off, l, 0});
      off += l;
    }
    std::uniform_int_distribution<std::size_t> kdist(c, c + 60);
    const std::size_t k = kdist(gen);
    const GroupLayout layout = allocate_basis(groups, k);
    std::size_t cap_total = 0;
    for (const auto& g : layout.groups) {
      EXPECT_GE(g.k, 1u);
      EXPECT_LE(g.k, g.length);
      cap_total += g.length;
    }
    EXPECT_EQ(layout.total_k(), std::min(k, cap_total));
  }
}

}  // namespace
}  // namespace gep
