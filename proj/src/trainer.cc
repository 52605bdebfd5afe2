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

#include "gep/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Dataset anchor_batch(const Dataset& aux, const ModelSpec& model,
                     std::size_t m, AuxLabelMode mode, RandomStream& rng) {
  const std::size_t count = std::min(m, aux.size());
  Dataset batch = aux;
  if (count < aux.size()) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    batch = aux.subset(idx);
  }
  if (mode == AuxLabelMode::kRandomEachStep) {
    if (model.is_classifier()) {
      const std::size_t classes = model.output_dim() == 1 ? 2 : model.output_dim();
      for (double& y : batch.labels) y = static_cast<double>(rng.uniform_index(classes));
    } else {
      for (double& y : batch.labels) y = rng.normal();
    }
  }
  return batch;
}

double safe_stable_rank(const DenseMatrix& m) {
  try {
    return stable_rank(m);
  } catch (const UndefinedValue&) {
    return kNaN;
  }
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kGep: return "gep";
    case Method::kBgep: return "bgep";
    case Method::kGp: return "gp";
    case Method::kRandomBasisGep: return "random-basis-gep";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "gep") return Method::kGep;
  if (name == "bgep") return Method::kBgep;
  if (name == "gp") return Method::kGp;
  if (name == "random-basis-gep") return Method::kRandomBasisGep;
  throw InvalidInput("unknown method '" + name + "'");
}

std::string to_string(AuxLabelMode mode) {
  return mode == AuxLabelMode::kRandomEachStep ? "random" : "fixed";
}

AuxLabelMode parse_aux_label_mode(const std::string& name) {
  if (name == "random") return AuxLabelMode::kRandomEachStep;
  if (name == "fixed") return AuxLabelMode::kFixed;
  throw InvalidInput("unknown auxiliary label mode '" + name + "'");
}

std::string to_string(Calibration mode) {
  return mode == Calibration::kSearch ? "search" : "closed";
}

Calibration parse_calibration(const std::string& name) {
  if (name == "search") return Calibration::kSearch;
  if (name == "closed") return Calibration::kClosedForm;
  throw InvalidInput("unknown calibration mode '" + name + "'");
}

void TrainConfig::validate() const {
  gep.validate();
  budget.validate();
  if (steps < 0) throw InvalidInput("TrainConfig: steps must be >= 0");
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    throw InvalidInput("TrainConfig: sample rate must be in (0, 1]");
  }
  if (!(lr > 0.0)) throw InvalidInput("TrainConfig: lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidInput("TrainConfig: momentum must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw InvalidInput("TrainConfig: weight decay must be >= 0");
  if (!(gp_clip > 0.0)) throw InvalidInput("TrainConfig: gp clip must be > 0");
  if (basis_refresh == 0) throw InvalidInput("TrainConfig: basis refresh must be >= 1");
}

std::vector<double> TrainConfig::accounting_orders() const {
  return sample_rate == 1.0 ? orders_with_analytic(budget) : default_orders();
}

double calibrate_unit_sigma(const TrainConfig& cfg, Calibration mode) {
  cfg.validate();
  if (mode == Calibration::kClosedForm) {
    if (cfg.sample_rate != 1.0) {
      throw InvalidInput("closed-form calibration needs full-batch training");
    }
    // The closed form covers two unit releases per step.
    return calibrate_sigma_closed_form(cfg.budget, std::max<std::int64_t>(cfg.steps, 1)) /
           std::sqrt(2.0);
  }
  const std::vector<double> orders = cfg.accounting_orders();
  return calibrate_sigma_search(cfg.budget, cfg.sample_rate,
                                std::max<std::int64_t>(cfg.steps, 1), orders);
}

double apply_calibration(TrainConfig& cfg, Calibration mode) {
  cfg.gep.sigma =
      GepConfig::sigma_for_mode(cfg.gep.release, calibrate_unit_sigma(cfg, mode));
  return cfg.gep.sigma;
}

OptimizerState optimizer_step(const Vector& params, const Vector& velocity,
                              std::span<const double> released, double lr,
                              double momentum, double weight_decay) {
  if (params.size() != velocity.size() || params.size() != released.size()) {
    throw InvalidInput("optimizer_step: size mismatch");
  }
  OptimizerState next{params, velocity};
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double grad = released[j] + weight_decay * params[j];
    next.velocity[j] = momentum * velocity[j] + grad;
    next.params[j] = params[j] - lr * next.velocity[j];
    if (!std::isfinite(next.params[j]) || !std::isfinite(next.velocity[j])) {
      std::ostringstream msg;
      msg << "optimizer_step: non-finite update at coordinate " << j
          << " (param=" << params[j] << ", velocity=" << velocity[j]
          << ", released=" << released[j] << ", lr=" << lr << ")";
      throw Divergence(msg.str());
    }
  }
  return next;
}

TrainResult dp_train(const TrainConfig& cfg, const Dataset& private_data,
                     const Dataset& aux_data, const Dataset& eval_data) {
  cfg.validate();
  private_data.validate();
  eval_data.validate();
  const bool uses_basis = cfg.method != Method::kGp;
  if (uses_basis) {
    aux_data.validate();
    if (aux_data.size() == 0) throw InvalidInput("dp_train: auxiliary data is empty");
  }

  TrainResult result{cfg.model, {}, Vector(cfg.model.num_params(), 0.0), {}};
  if (cfg.steps == 0) {
    result.averaged_params = cfg.model.params();
    return result;
  }

  GepConfig gep_cfg = cfg.gep;
  if (cfg.method == Method::kRandomBasisGep) gep_cfg.basis = BasisMode::kRandom;
  const double unit_sigma = gep_cfg.unit_sigma();
  // Gradient perturbation never builds a basis, so its k may be anything.
  const GroupLayout layout =
      cfg.method == Method::kGp
          ? GroupLayout{}
          : make_group_layout(cfg.model, gep_cfg.k, std::min(gep_cfg.m, aux_data.size()));
  const std::vector<double> orders = cfg.accounting_orders();
  const RdpCurve step_curve = gaussian_step_curve(orders, cfg.sample_rate, unit_sigma);

  ModelSpec& model = result.model;
  Vector velocity(model.num_params(), 0.0);
  AnchorBasis basis;
  std::vector<std::size_t> batch_idx;
  batch_idx.reserve(private_data.size());

  for (std::int64_t t = 0; t < cfg.steps; ++t) {
    StepMetrics sm;
    sm.step = t;
    sm.projection_error_rate = kNaN;
    sm.stable_rank_g = kNaN;
    sm.stable_rank_r = kNaN;
    sm.train_loss = mean_loss(model, private_data);

    batch_idx.clear();
    if (cfg.sample_rate == 1.0) {
      for (std::size_t i = 0; i < private_data.size(); ++i) batch_idx.push_back(i);
    } else {
      RandomStream rng = RandomStream::for_step(cfg.seed, t, kStreamBatch);
      for (std::size_t i = 0; i < private_data.size(); ++i) {
        if (rng.uniform() < cfg.sample_rate) batch_idx.push_back(i);
      }
    }
    sm.batch_size = batch_idx.size();

    if (uses_basis && t % static_cast<std::int64_t>(cfg.basis_refresh) == 0) {
      RandomStream label_rng = RandomStream::for_step(cfg.seed, t, kStreamAuxLabels);
      const Dataset anchors =
          anchor_batch(aux_data, model, gep_cfg.m, cfg.aux_labels, label_rng);
      RandomStream basis_rng = RandomStream::for_step(cfg.seed, t, kStreamBasis);
      std::vector<std::string> warnings;
      basis = build_anchor_basis(per_sample_gradients(model, anchors), layout,
                                 gep_cfg, basis_rng, t == 0 ? &warnings : nullptr);
      result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    }

    if (!batch_idx.empty()) {
      const DenseMatrix grads =
          per_sample_gradients(model, private_data.subset(batch_idx));
      if (!grads.all_finite()) {
        throw Divergence("dp_train: non-finite per-sample gradient at step " +
                         std::to_string(t));
      }
      RandomStream noise_rng = RandomStream::for_step(cfg.seed, t, kStreamNoise);
      Vector released;
      if (cfg.method == Method::kGp) {
        released = gp_release(grads, cfg.gp_clip, unit_sigma, noise_rng);
        sm.clip_fraction_embedding =
            static_cast<double>(count_rows_above(grads, cfg.gp_clip)) / grads.rows();
      } else {
        PrivateRelease rel = cfg.method == Method::kBgep
                                 ? bgep_release(grads, basis, gep_cfg, noise_rng)
                                 : gep_release(grads, basis, gep_cfg, noise_rng);
        released = std::move(rel.estimate);
        sm.k_effective = rel.k_effective;
        sm.clip_fraction_embedding = rel.clipped_embedding_fraction;
        sm.clip_fraction_residual = rel.clipped_residual_fraction;
        sm.projection_error_rate = rel.projection_error_rate;
      }
      if (cfg.stable_rank_diagnostics) {
        sm.stable_rank_g = safe_stable_rank(grads);
        if (uses_basis) sm.stable_rank_r = safe_stable_rank(basis.split(grads).residual);
      }
      const bool decayed = cfg.lr_decay && cfg.steps >= 2 && 2 * t >= cfg.steps;
      OptimizerState next =
          optimizer_step(model.params(), velocity, released,
                         decayed ? cfg.lr / 10.0 : cfg.lr, cfg.momentum,
                         cfg.weight_decay);
      model.set_params(std::move(next.params));
      velocity = std::move(next.velocity);
    }

    for (std::size_t j = 0; j < model.num_params(); ++j) {
      result.averaged_params[j] += model.params()[j];
    }
    const Evaluation ev = evaluate(model, eval_data);
    sm.eval_loss = ev.loss;
    sm.eval_accuracy = ev.accuracy;
    sm.epsilon_spent =
        rdp_to_dp(step_curve.scaled(static_cast<double>(t + 1)), cfg.budget.delta)
            .epsilon;
    result.metrics.push_back(sm);
  }
  for (double& v : result.averaged_params) v /= static_cast<double>(cfg.steps);
  return result;
}

}  // namespace gep
