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

#include "gep/synth.h"

#include <cmath>

#include "gep/errors.h"

namespace gep {

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kLowRankGradientTask: return "lowrank-gradient-task";
    case SynthKind::kGaussianMixture: return "gaussian-mixture";
    case SynthKind::kSeparable: return "separable";
  }
  return "unknown";
}

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "lowrank-gradient-task") return SynthKind::kLowRankGradientTask;
  if (name == "gaussian-mixture") return SynthKind::kGaussianMixture;
  if (name == "separable") return SynthKind::kSeparable;
  throw InvalidInput("unknown synthetic dataset kind '" + name + "'");
}

void SynthParams::validate(SynthKind kind) const {
  if (dim == 0) throw InvalidInput("synth: dim must be >= 1");
  switch (kind) {
    case SynthKind::kLowRankGradientTask:
      if (rank < 2 || rank - 1 > dim) {
        throw InvalidInput("synth: low-rank task needs 2 <= rank <= dim + 1");
      }
      if (!(tail_noise >= 0.0) || !(label_noise >= 0.0)) {
        throw InvalidInput("synth: noise levels must be >= 0");
      }
      break;
    case SynthKind::kGaussianMixture:
      if (classes < 2) throw InvalidInput("synth: mixture needs >= 2 classes");
      if (center_rank > dim || noise_rank > dim || nuisance_rank > dim) {
        throw InvalidInput("synth: mixture ranks exceed dim");
      }
      if (!(tail_noise >= 0.0) || !(nuisance_sd >= 0.0)) {
        throw InvalidInput("synth: noise levels must be >= 0");
      }
      if (!(cluster_sd >= 0.0)) throw InvalidInput("synth: cluster_sd must be >= 0");
      break;
    case SynthKind::kSeparable:
      if (!(margin >= 0.0)) throw InvalidInput("synth: margin must be >= 0");
      break;
  }
  if (kind != SynthKind::kLowRankGradientTask &&
      !(label_noise >= 0.0 && label_noise < 0.5)) {
    throw InvalidInput("synth: label flip rate must be in [0, 0.5)");
  }
}

SyntheticTask::SyntheticTask(SynthKind kind, SynthParams params, RandomStream& rng)
    : kind_(kind), params_(std::move(params)) {
  params_.validate(kind_);
  const std::size_t d = params_.dim;
  switch (kind_) {
    case SynthKind::kLowRankGradientTask: {
      const std::size_t r = params_.rank - 1;
      factors_ = orthonormalize_rows(gaussian_noise(r, d, 1.0, rng)).rows;
      if (factors_.rows() != r) throw InvalidInput("synth: degenerate factor draw");
      for (std::size_t j = 0; j < r; ++j) {
        const double sd = std::pow(static_cast<double>(j + 1), -0.5 * params_.spectrum_decay);
        for (double& v : factors_.row(j)) v *= sd;
      }
      teacher_ = Vector(d, 0.0);
      const DenseMatrix unit = orthonormalize_rows(factors_).rows;
      for (std::size_t j = 0; j < r; ++j) axpy(rng.normal(), unit.row(j), teacher_);
      break;
    }
    case SynthKind::kGaussianMixture: {
      const std::size_t cr = params_.center_rank == 0 ? d : params_.center_rank;
      const double scale = params_.separation / std::sqrt(static_cast<double>(cr));
      centers_ = DenseMatrix(params_.classes, d);
      for (std::size_t c = 0; c < params_.classes; ++c) {
        for (std::size_t j = 0; j < cr; ++j) centers_(c, j) = scale * rng.normal();
      }
      break;
    }
    case SynthKind::kSeparable: {
      teacher_ = gaussian_vector(d, 1.0, rng);
      const double nt = norm(teacher_);
      for (double& v : teacher_) v /= nt;
      break;
    }
  }
}

std::size_t SyntheticTask::num_classes() const {
  switch (kind_) {
    case SynthKind::kLowRankGradientTask: return 0;
    case SynthKind::kGaussianMixture: return params_.classes;
    case SynthKind::kSeparable: return 2;
  }
  return 0;
}

Dataset SyntheticTask::sample(std::size_t n, RandomStream& rng) const {
  const std::size_t d = params_.dim;
  Dataset out{DenseMatrix(n, d), Vector(n, 0.0), to_string(kind_)};
  for (std::size_t i = 0; i < n; ++i) {
    auto x = out.features.row(i);
    switch (kind_) {
      case SynthKind::kLowRankGradientTask: {
        for (std::size_t j = 0; j < factors_.rows(); ++j) axpy(rng.normal(), factors_.row(j), x);
        if (params_.tail_noise > 0.0) {
          for (double& v : x) v += params_.tail_noise * rng.normal();
        }
        out.labels[i] = dot(teacher_, x) + params_.label_noise * rng.normal();
        break;
      }
      case SynthKind::kGaussianMixture: {
        const std::size_t y = rng.uniform_index(params_.classes);
        const std::size_t nr = params_.noise_rank == 0 ? d : params_.noise_rank;
        for (std::size_t j = 0; j < d; ++j) {
          x[j] = centers_(y, j);
          if (j < nr) x[j] += params_.cluster_sd * rng.normal();
          if (j >= d - params_.nuisance_rank) x[j] += params_.nuisance_sd * rng.normal();
          if (params_.tail_noise > 0.0) x[j] += params_.tail_noise * rng.normal();
        }
        std::size_t label = y;
        if (params_.label_noise > 0.0 && rng.uniform() < params_.label_noise) {
          label = rng.uniform_index(params_.classes);
        }
        out.labels[i] = static_cast<double>(label);
        break;
      }
      case SynthKind::kSeparable: {
        for (double& v : x) v = rng.normal();
        const double t = dot(teacher_, x);
        const double shift = (t >= 0.0 ? 1.0 : -1.0) * params_.margin;
        axpy(shift, teacher_, x);
        bool positive = t >= 0.0;
        if (params_.label_noise > 0.0 && rng.uniform() < params_.label_noise) {
          positive = !positive;
        }
        out.labels[i] = positive ? 1.0 : 0.0;
        break;
      }
    }
  }
  return out;
}

Dataset synth_dataset(SynthKind kind, const SynthParams& params, RandomStream& rng) {
  return SyntheticTask(kind, params, rng).sample(params.n, rng);
}

Dataset gaussian_features(std::size_t n, std::size_t dim, std::size_t classes,
                          RandomStream& rng) {
  Dataset out{gaussian_noise(n, dim, 1.0, rng), Vector(n, 0.0), "gaussian-features"};
  for (double& y : out.labels) {
    y = classes == 0 ? rng.normal() : static_cast<double>(rng.uniform_index(classes));
  }
  return out;
}

}  // namespace gep
