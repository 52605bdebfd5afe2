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

// gep: command-line front end for training, accounting and diagnostics.

#include <iostream>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "gep/commands.h"

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Large per-step buffers otherwise bounce through mmap/munmap on every
  // allocation and the page faults dominate runtime.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif

  CLI::App app{"Differentially private training with gradient embedding perturbation"};
  app.require_subcommand(1);

  gep::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Run every sweep point in a config file");
  train_cmd->add_option("--config", train.config_path, "Run config file")->required();
  train_cmd->add_option("--seed", train.seed, "Override run.seeds with a single seed");
  train_cmd->add_option("--out", train.out_dir, "Override run.out_dir");
  train_cmd->add_option("--method", train.method, "Override run.methods (gep, bgep, gp, random-basis-gep)");

  gep::AccountantOptions acct;
  auto* acct_cmd = app.add_subcommand("accountant", "Calibrate the noise multiplier for a budget");
  acct_cmd->add_option("--epsilon", acct.epsilon)->capture_default_str();
  acct_cmd->add_option("--delta", acct.delta)->capture_default_str();
  acct_cmd->add_option("--steps", acct.steps)->capture_default_str();
  acct_cmd->add_option("--q", acct.q, "Poisson sampling rate")->capture_default_str();
  acct_cmd->add_option("--mode", acct.mode, "closed | search")->capture_default_str();

  gep::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Count multiply-adds of one power iteration");
  bench_cmd->add_option("--m", bench.m)->capture_default_str();
  bench_cmd->add_option("--k", bench.k)->capture_default_str();
  bench_cmd->add_option("--p", bench.p)->capture_default_str();
  bench_cmd->add_option("--groups", bench.groups)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();

  gep::ProjectErrorOptions pe;
  auto* pe_cmd = app.add_subcommand("project-error", "Sweep projection error over k, m and anchors");
  pe_cmd->add_option("--config", pe.config_path, "Take the task from data.* and model.*");
  pe_cmd->add_option("--task", pe.task, "approx-low-rank | exact-low-rank | mlp")->capture_default_str();
  pe_cmd->add_option("--k", pe.ks)->delimiter(',')->capture_default_str();
  pe_cmd->add_option("--m", pe.ms)->delimiter(',')->capture_default_str();
  pe_cmd->add_option("--basis", pe.bases, "power,random")->delimiter(',')->capture_default_str();
  pe_cmd->add_option("--anchors", pe.sources, "heldout-random,heldout-correct,synthetic")
      ->delimiter(',')
      ->capture_default_str();
  pe_cmd->add_option("--trials", pe.trials)->capture_default_str();
  pe_cmd->add_option("--power-iterations", pe.power_iterations)->capture_default_str();
  pe_cmd->add_option("--seed", pe.seed)->capture_default_str();
  pe_cmd->add_option("--out", pe.out_dir, "Also write projection_error.tsv here");

  gep::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Summarize metrics files into tables");
  report_cmd->add_option("inputs", report.inputs, "Metrics files or directories")->required();
  report_cmd->add_option("--out", report.out_path, "Also write the tables here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gep::kExitOk : gep::kExitConfig;
  }

  if (*train_cmd) return gep::cmd_train(train, std::cout, std::cerr);
  if (*acct_cmd) return gep::cmd_accountant(acct, std::cout, std::cerr);
  if (*bench_cmd) return gep::cmd_bench(bench, std::cout, std::cerr);
  if (*pe_cmd) return gep::cmd_project_error(pe, std::cout, std::cerr);
  return gep::cmd_report(report, std::cout, std::cerr);
}
