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

// Subcommand implementations behind the gep command-line tool. Each returns
// the process exit code: 0 success, 1 runtime failure, 2 configuration or
// usage error. Normal output goes to `out`, diagnostics to `err`.

#ifndef GEP_COMMANDS_H_
#define GEP_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gep {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct TrainOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> method;
};

// Loads the config, runs every sweep point, writes one metrics file per
// run plus summary.txt into the output directory and prints the summary.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);

struct AccountantOptions {
  double epsilon = 8.0;
  double delta = 1e-5;
  std::int64_t steps = 100;
  double q = 1.0;
  std::string mode = "closed";  // closed | search
};

// Prints the per-release noise multiplier for a step of two unit-
// sensitivity Gaussian releases, the minimizing order and a verification
// line recomputing epsilon from the printed sigma.
int cmd_accountant(const AccountantOptions& opts, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::size_t m = 100;
  std::size_t k = 20;
  std::size_t p = 1000;
  std::vector<std::size_t> groups = {1, 2, 5};
  std::uint64_t seed = 0;
};

// Fails when a measured/model ratio falls outside [0.9, 1.5].
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

struct ProjectErrorOptions {
  std::optional<std::string> config_path;  // data.* and model.* sections
  std::string task = "approx-low-rank";     // approx-low-rank | exact-low-rank | mlp
  std::vector<std::size_t> ks = {5, 10, 20, 40, 80};
  std::vector<std::size_t> ms = {200};
  std::vector<std::string> bases = {"power", "random"};
  std::vector<std::string> sources = {"heldout-random", "heldout-correct", "synthetic"};
  std::size_t trials = 10;
  std::size_t power_iterations = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> out_dir;
};

int cmd_project_error(const ProjectErrorOptions& opts, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::vector<std::string> inputs;  // metrics files or directories
  std::optional<std::string> out_path;
};

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace gep

#endif  // GEP_COMMANDS_H_
