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

#include "gep/config.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs, std::function<std::string(const T&)> f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    out += f(xs[i]);
  }
  return out;
}

struct BadValue {};

double to_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) throw BadValue{};
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) throw BadValue{};
  return v;
}

std::int64_t to_i64(const std::string& s) {
  std::int64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) throw BadValue{};
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw BadValue{};
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F f) {
  std::vector<T> out;
  if (s.empty()) return out;
  for (const std::string& item : split_list(s)) out.push_back(f(item));
  return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
  bool is_path = false;
};

#define GEP_SCALAR(key, field, getter, setter) \
  Key { key, [](const RunConfig& c) { return getter(c.field); }, \
        [](RunConfig& c, const std::string& v) { c.field = setter(v); } }

std::string str_id(const std::string& s) { return s; }
std::string u64_str(std::uint64_t v) { return std::to_string(v); }
std::string i64_str(std::int64_t v) { return std::to_string(v); }
std::size_t to_size(const std::string& s) { return static_cast<std::size_t>(to_u64(s)); }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(GEP_SCALAR("run.name", name, str_id, str_id));
    Key out = GEP_SCALAR("run.out_dir", out_dir, str_id, str_id);
    out.is_path = true;
    k.push_back(out);
    k.push_back({"run.seeds",
                 [](const RunConfig& c) {
                   return join<std::uint64_t>(c.seeds, [](const std::uint64_t& s) {
                     return std::to_string(s);
                   });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.seeds = parse_list<std::uint64_t>(v, to_u64);
                 }});
    k.push_back({"run.methods",
                 [](const RunConfig& c) {
                   return join<Method>(c.methods, [](const Method& m) { return to_string(m); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.methods = parse_list<Method>(v, parse_method);
                 }});
    k.push_back({"run.calibration", [](const RunConfig& c) { return to_string(c.calibration); },
                 [](RunConfig& c, const std::string& v) { c.calibration = parse_calibration(v); }});

    k.push_back({"data.source", [](const RunConfig& c) { return to_string(c.source); },
                 [](RunConfig& c, const std::string& v) { c.source = parse_data_source(v); }});
    k.push_back({"data.synth_kind", [](const RunConfig& c) { return to_string(c.synth_kind); },
                 [](RunConfig& c, const std::string& v) { c.synth_kind = parse_synth_kind(v); }});
    k.push_back(GEP_SCALAR("data.n", synth.n, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.dim", synth.dim, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.classes", synth.classes, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.rank", synth.rank, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.spectrum_decay", synth.spectrum_decay, fmt, to_double));
    k.push_back(GEP_SCALAR("data.tail_noise", synth.tail_noise, fmt, to_double));
    k.push_back(GEP_SCALAR("data.label_noise", synth.label_noise, fmt, to_double));
    k.push_back(GEP_SCALAR("data.separation", synth.separation, fmt, to_double));
    k.push_back(GEP_SCALAR("data.cluster_sd", synth.cluster_sd, fmt, to_double));
    k.push_back(GEP_SCALAR("data.center_rank", synth.center_rank, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.noise_rank", synth.noise_rank, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.nuisance_rank", synth.nuisance_rank, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.nuisance_sd", synth.nuisance_sd, fmt, to_double));
    k.push_back(GEP_SCALAR("data.margin", synth.margin, fmt, to_double));
    k.push_back(GEP_SCALAR("data.seed", data_seed, u64_str, to_u64));
    k.push_back(GEP_SCALAR("data.n_eval", n_eval, u64_str, to_size));
    k.push_back(GEP_SCALAR("data.n_aux", n_aux, u64_str, to_size));
    k.push_back({"data.aux_source", [](const RunConfig& c) { return to_string(c.aux_source); },
                 [](RunConfig& c, const std::string& v) { c.aux_source = parse_aux_source(v); }});
    for (auto [key, member] : {std::pair{"data.train_csv", &RunConfig::train_csv},
                               std::pair{"data.eval_csv", &RunConfig::eval_csv},
                               std::pair{"data.aux_csv", &RunConfig::aux_csv}}) {
      k.push_back({key, [member](const RunConfig& c) { return c.*member; },
                   [member](RunConfig& c, const std::string& v) { c.*member = v; }, true});
    }
    k.push_back(GEP_SCALAR("data.label_column", label_column, str_id, str_id));
    k.push_back({"data.normalize", [](const RunConfig& c) { return to_string(c.normalize); },
                 [](RunConfig& c, const std::string& v) { c.normalize = parse_normalize(v); }});

    k.push_back({"model.kind", [](const RunConfig& c) { return to_string(c.model); },
                 [](RunConfig& c, const std::string& v) { c.model = parse_model_kind(v); }});
    k.push_back({"model.hidden",
                 [](const RunConfig& c) {
                   return join<std::size_t>(c.hidden, [](const std::size_t& h) {
                     return std::to_string(h);
                   });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.hidden = parse_list<std::size_t>(v, to_size);
                 }});
    k.push_back(GEP_SCALAR("model.classes", classes, u64_str, to_size));
    k.push_back(GEP_SCALAR("model.init_scale", init_scale, fmt, to_double));

    k.push_back(GEP_SCALAR("train.steps", steps, i64_str, to_i64));
    k.push_back(GEP_SCALAR("train.sample_rate", sample_rate, fmt, to_double));
    k.push_back(GEP_SCALAR("train.lr", lr, fmt, to_double));
    k.push_back(GEP_SCALAR("train.momentum", momentum, fmt, to_double));
    k.push_back(GEP_SCALAR("train.weight_decay", weight_decay, fmt, to_double));
    k.push_back(GEP_SCALAR("train.lr_decay", lr_decay, bool_str, to_bool));
    k.push_back({"train.aux_labels", [](const RunConfig& c) { return to_string(c.aux_labels); },
                 [](RunConfig& c, const std::string& v) {
                   c.aux_labels = parse_aux_label_mode(v);
                 }});
    k.push_back(GEP_SCALAR("train.basis_refresh", basis_refresh, u64_str, to_size));
    k.push_back(GEP_SCALAR("train.stable_rank_diagnostics", stable_rank_diagnostics, bool_str,
                           to_bool));

    for (auto [key, member] : {std::pair{"gep.k", &RunConfig::k},
                               std::pair{"gep.m", &RunConfig::m}}) {
      k.push_back({key,
                   [member](const RunConfig& c) {
                     return join<std::size_t>(c.*member, [](const std::size_t& x) {
                       return std::to_string(x);
                     });
                   },
                   [member](RunConfig& c, const std::string& v) {
                     c.*member = parse_list<std::size_t>(v, to_size);
                   }});
    }
    k.push_back(GEP_SCALAR("gep.power_iterations", power_iterations, u64_str, to_size));
    k.push_back(GEP_SCALAR("gep.clip_embedding", clip_embedding, fmt, to_double));
    k.push_back(GEP_SCALAR("gep.clip_residual", clip_residual, fmt, to_double));
    k.push_back({"gep.release", [](const RunConfig& c) { return to_string(c.release); },
                 [](RunConfig& c, const std::string& v) { c.release = parse_release_mode(v); }});
    k.push_back(GEP_SCALAR("gp.clip", gp_clip, fmt, to_double));

    k.push_back({"privacy.epsilon",
                 [](const RunConfig& c) {
                   return join<double>(c.epsilon, [](const double& e) { return fmt(e); });
                 },
                 [](RunConfig& c, const std::string& v) {
                   c.epsilon = parse_list<double>(v, to_double);
                 }});
    k.push_back(GEP_SCALAR("privacy.delta", delta, fmt, to_double));
    k.push_back({"privacy.sigma",
                 [](const RunConfig& c) { return c.sigma ? fmt(*c.sigma) : std::string("auto"); },
                 [](RunConfig& c, const std::string& v) {
                   if (v == "auto") {
                     c.sigma.reset();
                   } else {
                     c.sigma = to_double(v);
                   }
                 }});
    return k;
  }();
  return table;
}

#undef GEP_SCALAR

}  // namespace

std::string to_string(DataSource s) { return s == DataSource::kSynth ? "synth" : "csv"; }

DataSource parse_data_source(const std::string& name) {
  if (name == "synth") return DataSource::kSynth;
  if (name == "csv") return DataSource::kCsv;
  throw InvalidInput("unknown data source '" + name + "'");
}

std::string to_string(AuxSource s) { return s == AuxSource::kHeldOut ? "heldout" : "gaussian"; }

AuxSource parse_aux_source(const std::string& name) {
  if (name == "heldout") return AuxSource::kHeldOut;
  if (name == "gaussian") return AuxSource::kGaussian;
  throw InvalidInput("unknown auxiliary source '" + name + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (seeds.empty()) fail("run.seeds must list at least one seed");
  if (methods.empty()) fail("run.methods must list at least one method");
  if (k.empty()) fail("gep.k must list at least one value");
  if (m.empty()) fail("gep.m must list at least one value");
  if (epsilon.empty()) fail("privacy.epsilon must list at least one value");
  if (source == DataSource::kCsv && train_csv.empty()) {
    fail("data.train_csv is required when data.source = csv");
  }
  if (model == ModelKind::kMlp && hidden.empty()) fail("model.hidden is required for mlp");
  if (sigma && !(*sigma >= 0.0)) fail("privacy.sigma must be >= 0");
  for (double e : epsilon) {
    if (!(e > 0.0)) fail("privacy.epsilon values must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) fail("privacy.delta must be in (0, 1)");
  if (steps < 0) fail("train.steps must be >= 0");
}

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
  std::map<std::string, const Key*> index;
  for (const Key& key : keys()) index[key.name] = &key;

  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string name = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = index.find(name);
    if (it == index.end()) {
      throw ConfigError("unknown config key '" + name + "' (line " + std::to_string(line_no) +
                        ")");
    }
    if (!seen.insert(name).second) throw ConfigError("duplicate config key '" + name + "'");
    std::string v = value;
    if (it->second->is_path && !v.empty() && !base_dir.empty() && fs::path(v).is_relative()) {
      v = (fs::path(base_dir) / v).lexically_normal().string();
    }
    try {
      it->second->set(cfg, v);
    } catch (const BadValue&) {
      throw ConfigError("config key '" + name + "': invalid value '" + value + "'");
    } catch (const InvalidInput& e) {
      throw ConfigError("config key '" + name + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  fs::path dir = fs::absolute(fs::path(path)).parent_path();
  return parse_run_config(buf.str(), dir.string());
}

std::string emit_run_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Key& key : keys()) {
    const std::string s = key.name.substr(0, key.name.find('.'));
    if (s != section) {
      if (!section.empty()) out += "\n";
      section = s;
    }
    out += key.name + " = " + key.get(cfg) + "\n";
  }
  return out;
}

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const Key& key : keys()) n.push_back(key.name);
    return n;
  }();
  return names;
}

}  // namespace gep
