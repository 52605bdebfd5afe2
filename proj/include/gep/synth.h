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

// Synthetic datasets. A SyntheticTask fixes the hidden structure (subspace,
// teacher weights, cluster centers) once, so that private, evaluation and
// auxiliary sets can be drawn from the same distribution.

#ifndef GEP_SYNTH_H_
#define GEP_SYNTH_H_

#include <cstddef>
#include <string>

#include "gep/linalg.h"
#include "gep/models.h"

namespace gep {

enum class SynthKind {
  // Linear-regression data whose per-sample gradients lie in a subspace of
  // dimension `rank` (features span rank - 1 directions, plus the bias).
  // With tail_noise > 0 the subspace is only approximate.
  kLowRankGradientTask,
  // `classes` Gaussian clusters with uniformly drawn labels.
  kGaussianMixture,
  // Binary labels separable by a unit normal with the given margin.
  kSeparable,
};

std::string to_string(SynthKind kind);
SynthKind parse_synth_kind(const std::string& name);

struct SynthParams {
  std::size_t n = 1000;
  std::size_t dim = 20;
  std::size_t classes = 2;       // mixture
  std::size_t rank = 5;          // low-rank task: gradient-subspace dimension
  double spectrum_decay = 0.0;   // low-rank task: factor j has variance j^-decay
  double tail_noise = 0.0;       // isotropic feature noise sd
  double label_noise = 0.1;      // regression noise sd / label flip rate
  double separation = 3.0;       // mixture: expected center norm
  double cluster_sd = 1.0;       // mixture: within-cluster sd
  std::size_t center_rank = 0;   // mixture: centers in the leading dims (0 = dim)
  std::size_t noise_rank = 0;    // mixture: cluster_sd only in leading dims (0 = dim)
  std::size_t nuisance_rank = 0; // mixture: trailing dims with extra variance
  double nuisance_sd = 0.0;
  double margin = 1.0;           // separable

  void validate(SynthKind kind) const;
  friend bool operator==(const SynthParams&, const SynthParams&) = default;
};

class SyntheticTask {
 public:
  // Draws the hidden structure from rng.
  SyntheticTask(SynthKind kind, SynthParams params, RandomStream& rng);

  SynthKind kind() const { return kind_; }
  const SynthParams& params() const { return params_; }
  std::size_t num_classes() const;  // 0 for regression

  Dataset sample(std::size_t n, RandomStream& rng) const;

 private:
  SynthKind kind_;
  SynthParams params_;
  DenseMatrix factors_;  // low-rank: (rank-1) x dim orthonormal, scaled rows
  Vector teacher_;       // low-rank / separable
  DenseMatrix centers_;  // mixture
};

// SyntheticTask(kind, params, rng).sample(params.n, rng).
Dataset synth_dataset(SynthKind kind, const SynthParams& params, RandomStream& rng);

// n x dim i.i.d. standard normal features with uniformly random labels over
// `classes` (standard normal targets when classes == 0).
Dataset gaussian_features(std::size_t n, std::size_t dim, std::size_t classes,
                          RandomStream& rng);

}  // namespace gep

#endif  // GEP_SYNTH_H_
