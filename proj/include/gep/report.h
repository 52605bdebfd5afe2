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

// Summaries of metrics streams: final-step accuracy per run, aggregated
// over seeds into method x epsilon and accuracy-vs-k tables.

#ifndef GEP_REPORT_H_
#define GEP_REPORT_H_

#include <string>
#include <vector>

#include "gep/metrics.h"

namespace gep {

struct SummaryRow {
  std::string method;
  double epsilon = 0.0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t runs = 0;
  double accuracy_mean = 0.0;  // NaN for regression runs
  double accuracy_std = 0.0;   // sample std over runs, 0 for one run
  double loss_mean = 0.0;
  double loss_std = 0.0;
};

// Uses the last step of every run_id. Rows are sorted by method, epsilon,
// k, m.
std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records);

// Rows: method (suffixed with k/m when those vary); columns: epsilon.
// Cells: mean +- std of accuracy in percent (loss for regression).
std::string format_method_epsilon_table(const std::vector<SummaryRow>& rows);

// Rows: method and epsilon; columns: k. Empty when only one k is present.
std::string format_k_sweep_table(const std::vector<SummaryRow>& rows);

// Reads every *.jsonl file under dir (sorted by name).
std::vector<MetricsRecord> read_metrics_dir(const std::string& dir);

}  // namespace gep

#endif  // GEP_REPORT_H_
