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

// Desk-scale models with per-sample gradients over a flat parameter
// vector: linear regression (squared error), logistic / softmax regression
// and tanh multilayer perceptrons (cross-entropy).
//
// Parameters are stored layer by layer; each layer holds its weight matrix
// (out x in, row-major) followed by its bias vector. For a single-output
// linear or logistic model this is the bias-augmented weight vector
// [w_1 .. w_d, b].

#ifndef GEP_MODELS_H_
#define GEP_MODELS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "gep/linalg.h"

namespace gep {

enum class ModelKind { kLinear, kLogistic, kMlp };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct Dataset {
  DenseMatrix features;  // n x d
  Vector labels;         // class index (as double) or regression target
  std::string name;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  Dataset subset(std::span<const std::size_t> indices) const;
  // Throws InvalidInput on length mismatch or non-finite features.
  void validate() const;
};

class ModelSpec {
 public:
  static ModelSpec linear(std::size_t input_dim);
  // num_classes == 2 uses a single sigmoid output; larger counts use
  // softmax over num_classes outputs.
  static ModelSpec logistic(std::size_t input_dim, std::size_t num_classes);
  static ModelSpec mlp(std::size_t input_dim, std::vector<std::size_t> hidden,
                       std::size_t num_classes);

  ModelKind kind() const { return kind_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  // Layer widths including input and output.
  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t num_layers() const { return widths_.size() - 1; }
  std::size_t num_params() const { return params_.size(); }
  bool is_classifier() const { return kind_ != ModelKind::kLinear; }

  // Offset and length of layer l's block (weights then bias).
  std::size_t layer_offset(std::size_t layer) const;
  std::size_t layer_length(std::size_t layer) const;

  Vector& params() { return params_; }
  const Vector& params() const { return params_; }
  void set_params(Vector params);

  // Small random weights (scale / sqrt(fan_in)), zero biases.
  void init_random(RandomStream& rng, double scale = 1.0);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(ModelKind kind, std::vector<std::size_t> widths);

  ModelKind kind_ = ModelKind::kLinear;
  std::vector<std::size_t> widths_;
  Vector params_;
};

// Row i is the gradient of the loss on sample i with respect to the flat
// parameter vector. Throws InvalidInput on an empty batch or dimension
// mismatch.
DenseMatrix per_sample_gradients(const ModelSpec& model, const Dataset& batch);

// Gradient of the mean loss, accumulated sample by sample without
// materializing the per-sample matrix.
Vector batch_gradient(const ModelSpec& model, const Dataset& batch);

// Mean per-sample loss.
double mean_loss(const ModelSpec& model, const Dataset& data);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;  // NaN for regression (not applicable)
};

Evaluation evaluate(const ModelSpec& model, const Dataset& data);

// Raw network outputs for one input (logits for classifiers).
Vector forward(const ModelSpec& model, std::span<const double> x);

struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t k = 0;  // basis vectors allotted to this group

  friend bool operator==(const ParamGroup&, const ParamGroup&) = default;
};

struct GroupLayout {
  std::vector<ParamGroup> groups;

  std::size_t total_k() const;
  std::size_t num_params() const;
};

// Splits k across groups in proportion to sqrt(length) by largest
// remainder, with every group receiving at least one vector and at most
// min(max_k_per_group, length). Clamped surplus moves to groups with room.
// Throws InvalidInput when k < number of groups.
GroupLayout allocate_basis(std::vector<ParamGroup> groups, std::size_t k,
                           std::size_t max_k_per_group = SIZE_MAX);

// One group per layer (biases merged into their layer).
GroupLayout make_group_layout(const ModelSpec& model, std::size_t k,
                              std::size_t max_k_per_group = SIZE_MAX);

// g contiguous groups of (near-)equal length over p parameters.
GroupLayout make_even_layout(std::size_t p, std::size_t k, std::size_t g,
                             std::size_t max_k_per_group = SIZE_MAX);

}  // namespace gep

#endif  // GEP_MODELS_H_
