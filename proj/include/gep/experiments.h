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

// Reusable experiment drivers: projection-error sweeps over basis size,
// anchor count, basis mode and anchor source; the multiply-add cost of one
// power iteration; and the convex (logistic regression) utility runs.

#ifndef GEP_EXPERIMENTS_H_
#define GEP_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gep/gep.h"
#include "gep/synth.h"
#include "gep/trainer.h"

namespace gep {

// Where anchor gradients come from.
enum class AnchorSource {
  kHeldOutRandomLabels,   // same distribution, labels redrawn at random
  kHeldOutCorrectLabels,  // same distribution, true labels
  kSynthetic,             // standard normal features, random labels
};

std::string to_string(AnchorSource s);
AnchorSource parse_anchor_source(const std::string& name);

// A synthetic task plus the model whose per-sample gradients are studied.
struct GradientTask {
  SynthKind kind = SynthKind::kLowRankGradientTask;
  SynthParams params;
  std::size_t n_private = 500;
  ModelKind model = ModelKind::kLinear;
  std::vector<std::size_t> hidden;
  double init_scale = 0.0;  // 0 keeps the all-zero start
  bool group_by_layer = true;

  ModelSpec make_model(RandomStream& rng) const;
};

// Linear regression, p = 200, factor variances j^-1.5 over all directions.
GradientTask approx_low_rank_task();
// Linear regression whose gradients span exactly `rank` dimensions.
GradientTask exact_low_rank_task(std::size_t rank, std::size_t params);
// Three tight Gaussian clusters, one tanh hidden layer of 64 (p ~ 1.5k).
GradientTask reference_mlp_task();

struct ProjectionSweepConfig {
  GradientTask task;
  std::vector<std::size_t> ks = {5, 10, 20, 40, 80};
  std::vector<std::size_t> ms = {200};
  std::vector<BasisMode> bases = {BasisMode::kPower, BasisMode::kRandom};
  std::vector<AnchorSource> sources = {AnchorSource::kHeldOutRandomLabels};
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::size_t power_iterations = 1;
  bool stable_ranks = false;
};

struct ProjectionPoint {
  BasisMode basis = BasisMode::kPower;
  AnchorSource source = AnchorSource::kHeldOutRandomLabels;
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<double> errors;          // one per trial
  std::vector<double> stable_rank_g;   // filled when stable_ranks is set
  std::vector<double> stable_rank_r;
  double mean() const;
  double stddev() const;
};

// Trial t draws a fresh task, private set and anchor pool from
// RandomStream(seed + t, 0); every (basis, source, k, m) point of a trial
// sees the same draws.
std::vector<ProjectionPoint> projection_error_sweep(const ProjectionSweepConfig& cfg);

std::string format_projection_table(const std::vector<ProjectionPoint>& points);

struct PowerIterationCost {
  std::size_t m = 0, k = 0, p = 0, groups = 1;
  std::uint64_t measured = 0;  // instrumented multiply-adds
  double model = 0.0;          // 2mkp/g + pk^2/g^2
  double ratio() const { return static_cast<double>(measured) / model; }
};

// One power iteration (including orthonormalization) per group of an even
// split of p parameters and k basis vectors.
PowerIterationCost measure_power_iteration_cost(std::size_t m, std::size_t k, std::size_t p,
                                                std::size_t groups, std::uint64_t seed);

// Binary logistic regression runs over methods, budgets and seeds.
struct ConvexExperimentConfig {
  SynthParams data;  // gaussian-mixture parameters (classes must be 2)
  std::size_t n_train = 2000;
  std::size_t n_eval = 2000;
  TrainConfig train;  // model/method/budget/seed are set per run
  std::vector<Method> methods = {Method::kGep, Method::kBgep, Method::kGp};
  std::vector<double> epsilons = {8.0};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
};

struct ConvexData {
  Dataset train, aux, eval;
};

// Data for one seed; identical across methods and budgets.
ConvexData convex_data(const ConvexExperimentConfig& cfg, std::uint64_t seed);

struct ConvexRun {
  Method method = Method::kGep;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;          // final iterate, evaluation set
  double objective = 0.0;         // final iterate: train loss + wd/2 |theta|^2
  double projection_error = 0.0;  // mean over steps (NaN for gp)
};

std::vector<ConvexRun> convex_utility_experiment(const ConvexExperimentConfig& cfg);

// Task where the class signal lies inside the top anchor directions and
// the rest of the gradient is isotropic feature noise spread over all p
// coordinates.
ConvexExperimentConfig convex_task_in_subspace();
// Task where high-variance nuisance directions fill the basis and the class
// signal sits in the residual.
ConvexExperimentConfig convex_task_outside_subspace();

}  // namespace gep

#endif  // GEP_EXPERIMENTS_H_
