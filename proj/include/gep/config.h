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

// Run configuration: a flat text document of `section.key = value` lines.
// Blank lines and lines starting with '#' are ignored. List-valued keys
// take comma-separated values; the sweep lists (gep.k, gep.m,
// privacy.epsilon) expand into one run per combination.

#ifndef GEP_CONFIG_H_
#define GEP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gep/csv.h"
#include "gep/gep.h"
#include "gep/synth.h"
#include "gep/trainer.h"

namespace gep {

enum class DataSource { kSynth, kCsv };
// Where anchor data comes from: a held-out draw of the same distribution
// (or aux_csv), or standard normal features.
enum class AuxSource { kHeldOut, kGaussian };

std::string to_string(DataSource s);
DataSource parse_data_source(const std::string& name);
std::string to_string(AuxSource s);
AuxSource parse_aux_source(const std::string& name);

struct RunConfig {
  // run.*
  std::string name = "run";
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds = {0};
  std::vector<Method> methods = {Method::kGep};
  Calibration calibration = Calibration::kSearch;

  // data.*
  DataSource source = DataSource::kSynth;
  SynthKind synth_kind = SynthKind::kGaussianMixture;
  SynthParams synth;
  std::uint64_t data_seed = 0;
  std::size_t n_eval = 1000;
  std::size_t n_aux = 200;
  AuxSource aux_source = AuxSource::kHeldOut;
  std::string train_csv;
  std::string eval_csv;
  std::string aux_csv;
  std::string label_column = "label";
  Normalize normalize = Normalize::kNone;

  // model.*
  ModelKind model = ModelKind::kLogistic;
  std::vector<std::size_t> hidden = {};
  std::size_t classes = 0;  // 0: infer from data
  double init_scale = 0.0;  // 0: zero initialization

  // train.*
  std::int64_t steps = 100;
  double sample_rate = 1.0;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  bool lr_decay = true;
  AuxLabelMode aux_labels = AuxLabelMode::kRandomEachStep;
  std::size_t basis_refresh = 1;
  bool stable_rank_diagnostics = false;

  // gep.* / gp.*
  std::vector<std::size_t> k = {20};
  std::vector<std::size_t> m = {200};
  std::size_t power_iterations = 1;
  double clip_embedding = 10.0;
  double clip_residual = 2.0;
  ReleaseMode release = ReleaseMode::kJoint;
  double gp_clip = 10.0;

  // privacy.*
  std::vector<double> epsilon = {8.0};
  double delta = 1e-5;
  // Unit-sensitivity noise multiplier; when set, calibration is skipped.
  std::optional<double> sigma;

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parses a config document. Relative paths are resolved against base_dir
// (when non-empty). Throws ConfigError naming the offending key or line.
RunConfig parse_run_config(const std::string& text, const std::string& base_dir = "");

// Reads and parses a file; paths resolve against the file's directory.
RunConfig load_run_config(const std::string& path);

// Canonical document listing every key.
std::string emit_run_config(const RunConfig& cfg);

// Every recognised key, in emission order.
const std::vector<std::string>& run_config_keys();

}  // namespace gep

#endif  // GEP_CONFIG_H_
