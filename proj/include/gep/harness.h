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

// Glue between a RunConfig and the trainer: dataset construction, model
// construction and expansion of sweep lists into individual runs.

#ifndef GEP_HARNESS_H_
#define GEP_HARNESS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gep/config.h"
#include "gep/models.h"
#include "gep/trainer.h"

namespace gep {

struct RunData {
  Dataset train;
  Dataset eval;
  Dataset aux;
  std::size_t classes = 0;  // 0 for regression
};

// Synthetic data is drawn from RandomStream(cfg.data_seed, 0), so it does
// not change with the run seed. CSV features are standardized (when asked)
// with statistics from the training file only.
RunData load_run_data(const RunConfig& cfg);

ModelSpec build_model(const RunConfig& cfg, const RunData& data, std::uint64_t seed);

struct RunPoint {
  Method method = Method::kGep;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::size_t k = 0;  // 0 for gradient perturbation
  std::size_t m = 0;
  std::string run_id;
};

// One point per (method, epsilon, k, m, seed); gradient perturbation
// ignores the k and m lists.
std::vector<RunPoint> expand_runs(const RunConfig& cfg);

// Full trainer configuration for one point. Noise is calibrated unless
// cfg.sigma overrides it.
TrainConfig make_train_config(const RunConfig& cfg, const RunPoint& point,
                              const ModelSpec& model);

}  // namespace gep

#endif  // GEP_HARNESS_H_
