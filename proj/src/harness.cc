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

#include "gep/harness.h"

#include <cmath>
#include <sstream>

#include "gep/csv.h"
#include "gep/errors.h"
#include "gep/synth.h"

namespace gep {
namespace {

std::size_t infer_classes(const Dataset& ds) {
  double top = 0.0;
  for (double y : ds.labels) {
    if (y < 0.0 || y != std::floor(y)) {
      throw ConfigError("labels must be non-negative integers for a classifier (found " +
                        std::to_string(y) + ")");
    }
    top = std::max(top, y);
  }
  return static_cast<std::size_t>(top) + 1;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

RunData load_run_data(const RunConfig& cfg) {
  RunData data;
  if (cfg.source == DataSource::kSynth) {
    RandomStream rng(cfg.data_seed, 0);
    const SyntheticTask task(cfg.synth_kind, cfg.synth, rng);
    data.train = task.sample(cfg.synth.n, rng);
    data.eval = task.sample(cfg.n_eval, rng);
    data.aux = cfg.aux_source == AuxSource::kHeldOut
                   ? task.sample(cfg.n_aux, rng)
                   : gaussian_features(cfg.n_aux, cfg.synth.dim, task.num_classes(), rng);
    data.classes = task.num_classes();
  } else {
    FeatureScaler scaler;
    data.train = ingest_csv(cfg.train_csv, cfg.label_column, cfg.normalize, &scaler);
    auto load_other = [&](const std::string& path) {
      Dataset ds = read_csv(path, cfg.label_column);
      if (ds.dim() != data.train.dim()) {
        throw ConfigError(path + ": feature count differs from the training file");
      }
      if (cfg.normalize == Normalize::kStandardize) scaler.apply(ds.features);
      return ds;
    };
    data.eval = cfg.eval_csv.empty() ? data.train : load_other(cfg.eval_csv);
    data.classes = cfg.model == ModelKind::kLinear ? 0 : infer_classes(data.train);
    if (!cfg.aux_csv.empty() && cfg.aux_source == AuxSource::kHeldOut) {
      data.aux = load_other(cfg.aux_csv);
    } else {
      RandomStream rng(cfg.data_seed, 1);
      data.aux = gaussian_features(cfg.n_aux, data.train.dim(), data.classes, rng);
    }
  }
  if (cfg.classes != 0) data.classes = cfg.classes;
  if (cfg.model == ModelKind::kLinear) data.classes = 0;
  return data;
}

ModelSpec build_model(const RunConfig& cfg, const RunData& data, std::uint64_t seed) {
  const std::size_t d = data.train.dim();
  if (cfg.model != ModelKind::kLinear && data.classes < 2) {
    throw ConfigError("classifier needs at least 2 classes (model.classes or labels)");
  }
  ModelSpec spec = ModelSpec::linear(d);
  switch (cfg.model) {
    case ModelKind::kLinear: break;
    case ModelKind::kLogistic: spec = ModelSpec::logistic(d, data.classes); break;
    case ModelKind::kMlp: spec = ModelSpec::mlp(d, cfg.hidden, data.classes); break;
  }
  if (cfg.init_scale > 0.0) {
    RandomStream rng(seed, 0xfeed);
    spec.init_random(rng, cfg.init_scale);
  }
  return spec;
}

std::vector<RunPoint> expand_runs(const RunConfig& cfg) {
  std::vector<RunPoint> out;
  for (Method method : cfg.methods) {
    for (double eps : cfg.epsilon) {
      const bool basis = method != Method::kGp;
      const std::vector<std::size_t> ks = basis ? cfg.k : std::vector<std::size_t>{0};
      const std::vector<std::size_t> ms = basis ? cfg.m : std::vector<std::size_t>{0};
      for (std::size_t k : ks) {
        for (std::size_t m : ms) {
          for (std::uint64_t seed : cfg.seeds) {
            RunPoint p{method, seed, eps, k, m, ""};
            std::string id = cfg.name + "-" + to_string(method) + "-eps" + fmt(eps);
            if (basis) id += "-k" + std::to_string(k) + "-m" + std::to_string(m);
            id += "-s" + std::to_string(seed);
            p.run_id = id;
            out.push_back(p);
          }
        }
      }
    }
  }
  return out;
}

TrainConfig make_train_config(const RunConfig& cfg, const RunPoint& point,
                              const ModelSpec& model) {
  TrainConfig tc;
  tc.model = model;
  tc.method = point.method;
  tc.gep.k = point.k == 0 ? 1 : point.k;
  tc.gep.m = point.m == 0 ? 1 : point.m;
  tc.gep.power_iterations = cfg.power_iterations;
  tc.gep.clip_embedding = cfg.clip_embedding;
  tc.gep.clip_residual = cfg.clip_residual;
  tc.gep.release = cfg.release;
  tc.gp_clip = cfg.gp_clip;
  tc.budget = {point.epsilon, cfg.delta};
  tc.steps = cfg.steps;
  tc.sample_rate = cfg.sample_rate;
  tc.lr = cfg.lr;
  tc.momentum = cfg.momentum;
  tc.weight_decay = cfg.weight_decay;
  tc.lr_decay = cfg.lr_decay;
  tc.seed = point.seed;
  tc.aux_labels = cfg.aux_labels;
  tc.basis_refresh = cfg.basis_refresh;
  tc.stable_rank_diagnostics = cfg.stable_rank_diagnostics;
  if (cfg.sigma) {
    tc.gep.sigma = GepConfig::sigma_for_mode(cfg.release, *cfg.sigma);
  } else {
    apply_calibration(tc, cfg.calibration);
  }
  return tc;
}

}  // namespace gep
