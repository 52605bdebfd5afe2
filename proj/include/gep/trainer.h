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

// Private training loop: every step draws a batch, estimates the anchor
// subspace from auxiliary data (labels redrawn at random by default),
// releases a private gradient and applies SGD with momentum and weight
// decay. The optimizer only ever sees released gradients.

#ifndef GEP_TRAINER_H_
#define GEP_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "gep/accountant.h"
#include "gep/gep.h"
#include "gep/linalg.h"
#include "gep/models.h"

namespace gep {

enum class Method { kGep, kBgep, kGp, kRandomBasisGep };
enum class AuxLabelMode { kRandomEachStep, kFixed };
enum class Calibration { kSearch, kClosedForm };

std::string to_string(Method method);
Method parse_method(const std::string& name);
std::string to_string(AuxLabelMode mode);
AuxLabelMode parse_aux_label_mode(const std::string& name);
std::string to_string(Calibration mode);
Calibration parse_calibration(const std::string& name);

// RNG substream purposes within one step.
enum StreamPurpose : std::uint32_t {
  kStreamBatch = 1,
  kStreamAuxLabels = 2,
  kStreamBasis = 3,
  kStreamNoise = 4,
};

struct TrainConfig {
  ModelSpec model = ModelSpec::linear(1);  // initial parameters
  Method method = Method::kGep;
  // Basis, thresholds and the release-mode noise multiplier. Gradient
  // perturbation and the biased variant use gep.unit_sigma().
  GepConfig gep;
  double gp_clip = 10.0;
  DpBudget budget{8.0, 1e-5};
  std::int64_t steps = 100;
  double sample_rate = 1.0;  // Poisson rate q; 1 means full batch
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  bool lr_decay = true;  // divide lr by 10 from the middle step on
  std::uint64_t seed = 0;
  AuxLabelMode aux_labels = AuxLabelMode::kRandomEachStep;
  std::size_t basis_refresh = 1;  // rebuild the basis every this many steps
  bool stable_rank_diagnostics = false;

  void validate() const;
  // Order grid used for calibration and for epsilon-spent reporting.
  std::vector<double> accounting_orders() const;
};

struct StepMetrics {
  std::int64_t step = 0;
  std::size_t batch_size = 0;
  double train_loss = 0.0;
  double eval_loss = 0.0;
  double eval_accuracy = 0.0;
  double projection_error_rate = 0.0;
  double stable_rank_g = 0.0;
  double stable_rank_r = 0.0;
  std::size_t k_effective = 0;
  double clip_fraction_embedding = 0.0;
  double clip_fraction_residual = 0.0;
  double epsilon_spent = 0.0;
};

struct TrainResult {
  ModelSpec model;
  std::vector<StepMetrics> metrics;
  Vector averaged_params;  // mean of the iterates after each update
  std::vector<std::string> warnings;
};

// Unit-sensitivity noise multiplier meeting cfg.budget over cfg.steps at
// cfg.sample_rate. Closed-form calibration requires full batches.
double calibrate_unit_sigma(const TrainConfig& cfg,
                            Calibration mode = Calibration::kSearch);

// Sets cfg.gep.sigma from calibrate_unit_sigma according to the release
// mode and returns it.
double apply_calibration(TrainConfig& cfg,
                         Calibration mode = Calibration::kSearch);

struct OptimizerState {
  Vector params;
  Vector velocity;
};

// grad = released + weight_decay * params; velocity' = momentum * velocity
// + grad; params' = params - lr * velocity'. Throws Divergence on a
// non-finite result.
OptimizerState optimizer_step(const Vector& params, const Vector& velocity,
                              std::span<const double> released, double lr,
                              double momentum, double weight_decay);

// Runs cfg.steps private updates. Anchor gradients use the first
// min(m, |aux|) auxiliary samples. A step whose Poisson batch is empty
// leaves the model unchanged but is still charged to the budget.
TrainResult dp_train(const TrainConfig& cfg, const Dataset& private_data,
                     const Dataset& aux_data, const Dataset& eval_data);

}  // namespace gep

#endif  // GEP_TRAINER_H_
