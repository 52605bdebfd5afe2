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

#include "gep/commands.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gep/accountant.h"
#include "gep/config.h"
#include "gep/errors.h"
#include "gep/experiments.h"
#include "gep/harness.h"
#include "gep/metrics.h"
#include "gep/report.h"

namespace gep {
namespace {

namespace fs = std::filesystem;

std::string summary_text(const std::vector<MetricsRecord>& records) {
  const std::vector<SummaryRow> rows = summarize(records);
  std::string text = "final accuracy (%), mean +- std over seeds\n";
  text += format_method_epsilon_table(rows);
  const std::string ksweep = format_k_sweep_table(rows);
  if (!ksweep.empty()) text += "\naccuracy vs k\n" + ksweep;
  return text;
}

// Runs body and maps exceptions to exit codes.
template <class F>
int guarded(std::ostream& err, F body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    RunConfig cfg = load_run_config(opts.config_path);
    if (opts.seed) cfg.seeds = {*opts.seed};
    if (opts.out_dir) cfg.out_dir = fs::absolute(*opts.out_dir).lexically_normal().string();
    if (opts.method) {
      try {
        cfg.methods = {parse_method(*opts.method)};
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
    }
    cfg.validate();
    const RunData data = load_run_data(cfg);
    fs::create_directories(cfg.out_dir);
    {
      std::ofstream resolved(fs::path(cfg.out_dir) / "config.resolved");
      resolved << emit_run_config(cfg);
    }

    std::vector<MetricsRecord> all;
    for (const RunPoint& point : expand_runs(cfg)) {
      const ModelSpec model = build_model(cfg, data, point.seed);
      TrainConfig tc;
      try {
        tc = make_train_config(cfg, point, model);
      } catch (const CalibrationFailure& e) {
        std::ostringstream msg;
        msg << "calibration failed for run " << point.run_id << " (epsilon=" << point.epsilon
            << ", delta=" << cfg.delta << ", steps=" << cfg.steps
            << ", sample_rate=" << cfg.sample_rate << "): " << e.what();
        throw CalibrationFailure(msg.str());
      }
      const TrainResult result = dp_train(tc, data.train, data.aux, data.eval);
      for (const std::string& w : result.warnings) err << point.run_id << ": warning: " << w << "\n";

      const fs::path file = fs::path(cfg.out_dir) / (point.run_id + ".jsonl");
      fs::remove(file);
      MetricsWriter writer(file.string());
      for (const StepMetrics& s : result.metrics) {
        MetricsRecord rec{point.run_id, to_string(point.method), point.seed, point.epsilon,
                          cfg.delta, point.k, point.m, tc.gep.sigma, s};
        writer.write(rec);
        all.push_back(rec);
      }
      out << "finished " << point.run_id;
      if (!result.metrics.empty()) {
        const StepMetrics& last = result.metrics.back();
        out << "  accuracy=" << last.eval_accuracy << " loss=" << last.eval_loss
            << " epsilon_spent=" << last.epsilon_spent;
      }
      out << "\n";
    }
    const std::string summary = summary_text(all);
    std::ofstream(fs::path(cfg.out_dir) / "summary.txt") << summary;
    out << "\n" << summary;
    return kExitOk;
  });
}

int cmd_accountant(const AccountantOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    const DpBudget budget{opts.epsilon, opts.delta};
    try {
      budget.validate();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
    if (opts.steps < 1) throw ConfigError("--steps must be >= 1");
    if (!(opts.q > 0.0 && opts.q <= 1.0)) throw ConfigError("--q must be in (0, 1]");
    if (opts.mode != "closed" && opts.mode != "search") {
      throw ConfigError("--mode must be closed or search");
    }
    if (opts.mode == "closed" && opts.q != 1.0) {
      throw ConfigError("--mode closed assumes full batches (q = 1); use --mode search");
    }

    double sigma = 0.0;  // per release, two releases per step
    if (opts.mode == "closed") {
      try {
        sigma = calibrate_sigma_closed_form(budget, opts.steps);
      } catch (const OutOfRegime& e) {
        err << e.what() << "\nrerun with --mode search\n";
        return kExitConfig;
      }
    } else {
      const std::vector<double> orders =
          opts.q == 1.0 ? orders_with_analytic(budget) : default_orders();
      sigma = std::sqrt(2.0) * calibrate_sigma_search(budget, opts.q, opts.steps, orders);
    }
    const double unit = sigma / std::sqrt(2.0);
    const std::vector<double> orders =
        opts.q == 1.0 ? orders_with_analytic(budget) : default_orders();
    const DpConversion check = epsilon_after(orders, opts.q, unit, opts.steps, opts.delta);

    out << std::setprecision(10);
    out << "mode: " << opts.mode << "\n";
    out << "budget: epsilon=" << opts.epsilon << " delta=" << opts.delta
        << " steps=" << opts.steps << " q=" << opts.q << "\n";
    out << "sigma: " << sigma << "  (each step releases two unit-sensitivity sums)\n";
    out << "unit_sigma: " << unit << "  (single release with the same per-step cost)\n";
    out << "certificate: order=" << check.order << " epsilon=" << check.epsilon << "\n";
    const bool ok = check.epsilon <= opts.epsilon * (1.0 + 1e-9);
    out << "verify: epsilon(sigma) = " << check.epsilon << (ok ? " <= " : " > ")
        << opts.epsilon << (ok ? "  ok" : "  FAILED") << "\n";
    return ok ? kExitOk : kExitFailure;
  });
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (opts.groups.empty()) throw ConfigError("--groups must list at least one value");
    out << "one power iteration, m=" << opts.m << " k=" << opts.k << " p=" << opts.p << "\n";
    out << "groups\tmeasured_macs\tmodel_macs\tratio\n";
    bool ok = true;
    for (std::size_t g : opts.groups) {
      if (g == 0 || g > opts.k || g > opts.p) {
        throw ConfigError("--groups values must be in [1, min(k, p)]");
      }
      const PowerIterationCost c = measure_power_iteration_cost(opts.m, opts.k, opts.p, g, opts.seed);
      const bool in_range = c.ratio() >= 0.9 && c.ratio() <= 1.5;
      ok = ok && in_range;
      out << g << "\t" << c.measured << "\t" << std::setprecision(6) << c.model << "\t"
          << std::setprecision(4) << c.ratio() << (in_range ? "" : "\tOUT OF RANGE") << "\n";
    }
    if (!ok) err << "measured/model ratio outside [0.9, 1.5]\n";
    return ok ? kExitOk : kExitFailure;
  });
}

int cmd_project_error(const ProjectErrorOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    ProjectionSweepConfig sweep;
    if (opts.config_path) {
      const RunConfig cfg = load_run_config(*opts.config_path);
      if (cfg.source != DataSource::kSynth) {
        throw ConfigError("project-error needs data.source = synth");
      }
      sweep.task.kind = cfg.synth_kind;
      sweep.task.params = cfg.synth;
      sweep.task.n_private = cfg.synth.n;
      sweep.task.model = cfg.model;
      sweep.task.hidden = cfg.hidden;
      sweep.task.init_scale = cfg.init_scale;
    } else if (opts.task == "approx-low-rank") {
      sweep.task = approx_low_rank_task();
    } else if (opts.task == "exact-low-rank") {
      sweep.task = exact_low_rank_task(5, 100);
    } else if (opts.task == "mlp") {
      sweep.task = reference_mlp_task();
    } else {
      throw ConfigError("unknown --task '" + opts.task + "'");
    }
    sweep.ks = opts.ks;
    sweep.ms = opts.ms;
    sweep.bases.clear();
    sweep.sources.clear();
    try {
      for (const std::string& b : opts.bases) sweep.bases.push_back(parse_basis_mode(b));
      for (const std::string& s : opts.sources) sweep.sources.push_back(parse_anchor_source(s));
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
    if (sweep.ks.empty() || sweep.ms.empty() || sweep.bases.empty() || sweep.sources.empty() ||
        opts.trials == 0) {
      throw ConfigError("empty sweep");
    }
    sweep.trials = opts.trials;
    sweep.seed = opts.seed;
    sweep.power_iterations = opts.power_iterations;
    sweep.stable_ranks = true;
    const std::string table = format_projection_table(projection_error_sweep(sweep));
    out << table;
    if (opts.out_dir) {
      fs::create_directories(*opts.out_dir);
      std::ofstream(fs::path(*opts.out_dir) / "projection_error.tsv") << table;
    }
    return kExitOk;
  });
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() {
    if (opts.inputs.empty()) throw ConfigError("report needs at least one input");
    std::vector<MetricsRecord> records;
    for (const std::string& in : opts.inputs) {
      std::vector<MetricsRecord> r =
          fs::is_directory(in) ? read_metrics_dir(in) : read_metrics(in);
      records.insert(records.end(), r.begin(), r.end());
    }
    if (records.empty()) throw ParseError("no metrics records found");
    const std::string text = summary_text(records);
    out << text;
    if (opts.out_path) std::ofstream(*opts.out_path) << text;
    return kExitOk;
  });
}

}  // namespace gep
