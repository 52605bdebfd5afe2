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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

// Numerically stable log(1 + exp(z)).
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t class_index(const ModelSpec& model, double label) {
  const std::size_t classes = model.output_dim() == 1 ? 2 : model.output_dim();
  if (!(label >= 0.0) || std::floor(label) != label ||
      label >= static_cast<double>(classes)) {
    std::ostringstream msg;
    msg << "label " << label << " is not a class index in [0, " << classes << ")";
    throw InvalidInput(msg.str());
  }
  return static_cast<std::size_t>(label);
}

void check_batch(const ModelSpec& model, const Dataset& data) {
  if (data.size() == 0) throw InvalidInput("empty dataset");
  if (data.dim() != model.input_dim()) {
    std::ostringstream msg;
    msg << "dataset has " << data.dim() << " features, model expects "
        << model.input_dim();
    throw InvalidInput(msg.str());
  }
  if (data.labels.size() != data.size()) {
    throw InvalidInput("dataset labels and features differ in length");
  }
}

// Activations of every layer for one input; acts[0] is the input.
std::vector<Vector> forward_all(const ModelSpec& model,
                                std::span<const double> x) {
  const auto& widths = model.widths();
  const Vector& theta = model.params();
  std::vector<Vector> acts;
  acts.reserve(widths.size());
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    const double* w = theta.data() + model.layer_offset(l);
    const double* b = w + out * in;
    const Vector& prev = acts.back();
    Vector z(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (std::size_t i = 0; i < in; ++i) s += w[o * in + i] * prev[i];
      z[o] = s;
    }
    if (l + 1 < model.num_layers()) {
      for (double& v : z) v = std::tanh(v);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

// Loss of one sample and its derivative with respect to the output layer.
double output_loss(const ModelSpec& model, const Vector& out, double label,
                   Vector* dout) {
  if (model.kind() == ModelKind::kLinear) {
    const double r = out[0] - label;
    if (dout) *dout = {r};
    return 0.5 * r * r;
  }
  const std::size_t y = class_index(model, label);
  if (model.output_dim() == 1) {
    const double z = out[0];
    if (dout) *dout = {sigmoid(z) - static_cast<double>(y)};
    return softplus(z) - static_cast<double>(y) * z;
  }
  const double hi = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double v : out) sum += std::exp(v - hi);
  const double lse = hi + std::log(sum);
  if (dout) {
    dout->resize(out.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
      (*dout)[c] = std::exp(out[c] - lse) - (c == y ? 1.0 : 0.0);
    }
  }
  return lse - out[y];
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "linear";
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kMlp: return "mlp";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp") return ModelKind::kMlp;
  throw InvalidInput("unknown model kind '" + name + "'");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.features = features.select_rows(indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  out.name = name;
  return out;
}

void Dataset::validate() const {
  if (labels.size() != features.rows()) {
    throw InvalidInput("dataset '" + name + "': " +
                       std::to_string(features.rows()) + " feature rows but " +
                       std::to_string(labels.size()) + " labels");
  }
  if (!features.all_finite()) {
    throw InvalidInput("dataset '" + name + "': non-finite features");
  }
}

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec::ModelSpec(ModelKind kind, std::vector<std::size_t> widths)
    : kind_(kind), widths_(std::move(widths)) {
  for (std::size_t w : widths_) {
    if (w == 0) throw InvalidInput("model layer widths must be >= 1");
  }
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    p += widths_[l + 1] * (widths_[l] + 1);
  }
  params_.assign(p, 0.0);
}

ModelSpec ModelSpec::linear(std::size_t input_dim) {
  return ModelSpec(ModelKind::kLinear, {input_dim, 1});
}

ModelSpec ModelSpec::logistic(std::size_t input_dim, std::size_t num_classes) {
  if (num_classes < 2) throw InvalidInput("logistic model needs >= 2 classes");
  return ModelSpec(ModelKind::kLogistic,
                   {input_dim, num_classes == 2 ? 1 : num_classes});
}

ModelSpec ModelSpec::mlp(std::size_t input_dim, std::vector<std::size_t> hidden,
                         std::size_t num_classes) {
  if (hidden.empty()) throw InvalidInput("mlp needs at least one hidden layer");
  if (num_classes < 2) throw InvalidInput("mlp needs >= 2 classes");
  std::vector<std::size_t> widths{input_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(num_classes == 2 ? 1 : num_classes);
  return ModelSpec(ModelKind::kMlp, std::move(widths));
}

std::size_t ModelSpec::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += layer_length(l);
  return off;
}

std::size_t ModelSpec::layer_length(std::size_t layer) const {
  return widths_.at(layer + 1) * (widths_.at(layer) + 1);
}

void ModelSpec::set_params(Vector params) {
  if (params.size() != params_.size()) {
    throw InvalidInput("set_params: expected " + std::to_string(params_.size()) +
                       " parameters, got " + std::to_string(params.size()));
  }
  params_ = std::move(params);
}

void ModelSpec::init_random(RandomStream& rng, double scale) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double s = scale / std::sqrt(static_cast<double>(in));
    double* w = params_.data() + layer_offset(l);
    for (std::size_t i = 0; i < out * in; ++i) w[i] = s * rng.normal();
    std::fill(w + out * in, w + out * (in + 1), 0.0);
  }
}

// ---------------------------------------------------------------------------
// Gradients and evaluation

Vector forward(const ModelSpec& model, std::span<const double> x) {
  if (x.size() != model.input_dim()) throw InvalidInput("forward: input size mismatch");
  return forward_all(model, x).back();
}

namespace {

// Backpropagates one sample and writes weight * gradient into out
// (accumulating when accumulate is set).
void sample_gradient(const ModelSpec& model, std::span<const double> x,
                     double label, double weight, bool accumulate,
                     std::span<double> out) {
  const auto& widths = model.widths();
  const Vector& theta = model.params();
  const std::vector<Vector> acts = forward_all(model, x);
  Vector delta, prev_delta;
  output_loss(model, acts.back(), label, &delta);
  auto put = [&](std::size_t idx, double v) {
    if (accumulate) {
      out[idx] += weight * v;
    } else {
      out[idx] = weight * v;
    }
  };
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const std::size_t in = widths[l], out_w = widths[l + 1];
    const std::size_t off = model.layer_offset(l);
    const Vector& a = acts[l];
    for (std::size_t o = 0; o < out_w; ++o) {
      for (std::size_t j = 0; j < in; ++j) put(off + o * in + j, delta[o] * a[j]);
      put(off + out_w * in + o, delta[o]);
    }
    if (l == 0) break;
    const double* w = theta.data() + off;
    prev_delta.assign(in, 0.0);
    for (std::size_t o = 0; o < out_w; ++o) {
      for (std::size_t j = 0; j < in; ++j) prev_delta[j] += w[o * in + j] * delta[o];
    }
    for (std::size_t j = 0; j < in; ++j) prev_delta[j] *= 1.0 - a[j] * a[j];
    std::swap(delta, prev_delta);
  }
}

}  // namespace

DenseMatrix per_sample_gradients(const ModelSpec& model, const Dataset& batch) {
  check_batch(model, batch);
  DenseMatrix grads(batch.size(), model.num_params());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sample_gradient(model, batch.features.row(i), batch.labels[i], 1.0, false,
                    grads.row(i));
  }
  return grads;
}

Vector batch_gradient(const ModelSpec& model, const Dataset& batch) {
  check_batch(model, batch);
  Vector grad(model.num_params(), 0.0);
  const double w = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    sample_gradient(model, batch.features.row(i), batch.labels[i], w, true, grad);
  }
  return grad;
}

double mean_loss(const ModelSpec& model, const Dataset& data) {
  return evaluate(model, data).loss;
}

Evaluation evaluate(const ModelSpec& model, const Dataset& data) {
  check_batch(model, data);
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector out = forward(model, data.features.row(i));
    loss += output_loss(model, out, data.labels[i], nullptr);
    if (!model.is_classifier()) continue;
    std::size_t pred;
    if (out.size() == 1) {
      pred = out[0] > 0.0 ? 1 : 0;
    } else {
      pred = static_cast<std::size_t>(
          std::max_element(out.begin(), out.end()) - out.begin());
    }
    if (pred == class_index(model, data.labels[i])) ++correct;
  }
  const double n = static_cast<double>(data.size());
  Evaluation ev;
  ev.loss = loss / n;
  ev.accuracy = model.is_classifier() ? static_cast<double>(correct) / n
                                      : std::numeric_limits<double>::quiet_NaN();
  return ev;
}

// ---------------------------------------------------------------------------
// Group layouts

std::size_t GroupLayout::total_k() const {
  std::size_t k = 0;
  for (const auto& g : groups) k += g.k;
  return k;
}

std::size_t GroupLayout::num_params() const {
  std::size_t p = 0;
  for (const auto& g : groups) p += g.length;
  return p;
}

GroupLayout allocate_basis(std::vector<ParamGroup> groups, std::size_t k,
                           std::size_t max_k_per_group) {
  const std::size_t count = groups.size();
  if (count == 0) throw InvalidInput("allocate_basis: no groups");
  if (k < count) {
    throw InvalidInput("k=" + std::to_string(k) + " is smaller than the " +
                       std::to_string(count) + " parameter groups");
  }
  std::vector<double> quota(count);
  double total_weight = 0.0;
  for (std::size_t g = 0; g < count; ++g) {
    quota[g] = std::sqrt(static_cast<double>(groups[g].length));
    total_weight += quota[g];
  }
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < count; ++g) {
    quota[g] *= static_cast<double>(k) / total_weight;
    groups[g].k = static_cast<std::size_t>(std::floor(quota[g]));
    assigned += groups[g].k;
  }
  // Largest remainder; ties go to the earlier group.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quota[a] - std::floor(quota[a]) > quota[b] - std::floor(quota[b]);
  });
  for (std::size_t i = 0; assigned < k; ++i, ++assigned) {
    ++groups[order[i % count]].k;
  }

  // Every group gets at least one vector, taken from the group furthest
  // above its quota.
  for (std::size_t g = 0; g < count; ++g) {
    if (groups[g].k > 0) continue;
    std::size_t donor = count;
    for (std::size_t h = 0; h < count; ++h) {
      if (groups[h].k <= 1) continue;
      if (donor == count || groups[h].k - quota[h] > groups[donor].k - quota[donor]) {
        donor = h;
      }
    }
    --groups[donor].k;
    groups[g].k = 1;
  }

  // Caps: move the surplus to groups with room, largest deficit first.
  std::size_t surplus = 0;
  for (auto& grp : groups) {
    const std::size_t cap = std::min(max_k_per_group, grp.length);
    if (grp.k > cap) {
      surplus += grp.k - cap;
      grp.k = cap;
    }
  }
  while (surplus > 0) {
    std::size_t best = count;
    for (std::size_t g = 0; g < count; ++g) {
      if (groups[g].k >= std::min(max_k_per_group, groups[g].length)) continue;
      if (best == count || quota[g] - groups[g].k > quota[best] - groups[best].k) {
        best = g;
      }
    }
    if (best == count) break;
    ++groups[best].k;
    --surplus;
  }
  return {std::move(groups)};
}

GroupLayout make_group_layout(const ModelSpec& model, std::size_t k,
                              std::size_t max_k_per_group) {
  std::vector<ParamGroup> groups;
  const std::size_t layers = model.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    std::string name = layers == 1         ? "all"
                       : l + 1 == layers   ? "output"
                                           : "hidden" + std::to_string(l + 1);
    groups.push_back({std::move(name), model.layer_offset(l),
                      model.layer_length(l), 0});
  }
  return allocate_basis(std::move(groups), k, max_k_per_group);
}

GroupLayout make_even_layout(std::size_t p, std::size_t k, std::size_t g,
                             std::size_t max_k_per_group) {
  if (g == 0 || g > p) throw InvalidInput("make_even_layout: need 1 <= g <= p");
  std::vector<ParamGroup> groups;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t len = p / g + (i < p % g ? 1 : 0);
    groups.push_back({"group" + std::to_string(i), offset, len, 0});
    offset += len;
  }
  return allocate_basis(std::move(groups), k, max_k_per_group);
}

}  // namespace gep
