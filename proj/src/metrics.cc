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

#include "gep/metrics.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "gep/errors.h"
#include "json.hpp"

namespace gep {
namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {
      "run_id", "method", "seed", "epsilon", "delta", "k", "m", "sigma", "step",
      "batch_size", "train_loss", "eval_loss", "eval_accuracy", "projection_error_rate",
      "stable_rank_g", "stable_rank_r", "k_effective", "clip_fraction_embedding",
      "clip_fraction_residual", "epsilon_spent"};
  return names;
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double get_num(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

}  // namespace

std::string metrics_header_line() {
  Json h;
  h["schema"] = kMetricsSchema;
  h["version"] = kMetricsVersion;
  h["fields"] = field_names();
  return h.dump();
}

std::string to_jsonl(const MetricsRecord& r) {
  Json j;
  j["run_id"] = r.run_id;
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["epsilon"] = num(r.epsilon);
  j["delta"] = num(r.delta);
  j["k"] = r.k;
  j["m"] = r.m;
  j["sigma"] = num(r.sigma);
  const StepMetrics& s = r.step;
  j["step"] = s.step;
  j["batch_size"] = s.batch_size;
  j["train_loss"] = num(s.train_loss);
  j["eval_loss"] = num(s.eval_loss);
  j["eval_accuracy"] = num(s.eval_accuracy);
  j["projection_error_rate"] = num(s.projection_error_rate);
  j["stable_rank_g"] = num(s.stable_rank_g);
  j["stable_rank_r"] = num(s.stable_rank_r);
  j["k_effective"] = s.k_effective;
  j["clip_fraction_embedding"] = num(s.clip_fraction_embedding);
  j["clip_fraction_residual"] = num(s.clip_fraction_residual);
  j["epsilon_spent"] = num(s.epsilon_spent);
  return j.dump();
}

MetricsRecord parse_metrics_line(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid metrics record: ") + e.what());
  }
  try {
    MetricsRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.epsilon = get_num(j, "epsilon");
    r.delta = get_num(j, "delta");
    r.k = j.at("k").get<std::size_t>();
    r.m = j.at("m").get<std::size_t>();
    r.sigma = get_num(j, "sigma");
    StepMetrics& s = r.step;
    s.step = j.at("step").get<std::int64_t>();
    s.batch_size = j.at("batch_size").get<std::size_t>();
    s.train_loss = get_num(j, "train_loss");
    s.eval_loss = get_num(j, "eval_loss");
    s.eval_accuracy = get_num(j, "eval_accuracy");
    s.projection_error_rate = get_num(j, "projection_error_rate");
    s.stable_rank_g = get_num(j, "stable_rank_g");
    s.stable_rank_r = get_num(j, "stable_rank_r");
    s.k_effective = j.at("k_effective").get<std::size_t>();
    s.clip_fraction_embedding = get_num(j, "clip_fraction_embedding");
    s.clip_fraction_residual = get_num(j, "clip_fraction_residual");
    s.epsilon_spent = get_num(j, "epsilon_spent");
    return r;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("invalid metrics record: ") + e.what());
  }
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path) {
  namespace fs = std::filesystem;
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  out_.open(path, std::ios::app | std::ios::binary);
  if (!out_) throw Error("cannot open metrics file '" + path + "'");
  if (fresh) out_ << metrics_header_line() << '\n';
}

void MetricsWriter::write(const MetricsRecord& record) {
  out_ << to_jsonl(record) << '\n';
  out_.flush();
  if (!out_) throw Error("failed writing metrics file '" + path_ + "'");
}

std::vector<MetricsRecord> read_metrics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open metrics file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty metrics file");
  try {
    const Json h = Json::parse(line);
    if (h.at("schema").get<std::string>() != kMetricsSchema ||
        h.at("version").get<int>() != kMetricsVersion) {
      throw ParseError(path + ": line 1: unsupported metrics schema");
    }
  } catch (const Json::exception&) {
    throw ParseError(path + ": line 1: missing metrics header");
  }
  std::vector<MetricsRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_metrics_line(line));
    } catch (const ParseError& e) {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gep
