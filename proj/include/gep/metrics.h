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

// Metrics stream: newline-delimited JSON. The first line is a schema header;
// each following line is one step of one run with keys in a fixed order.
// Non-finite values are written as null.

#ifndef GEP_METRICS_H_
#define GEP_METRICS_H_

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gep/trainer.h"

namespace gep {

inline constexpr const char* kMetricsSchema = "gep-metrics";
inline constexpr int kMetricsVersion = 1;

struct MetricsRecord {
  std::string run_id;
  std::string method;
  std::uint64_t seed = 0;
  double epsilon = 0.0;  // target budget
  double delta = 0.0;
  std::size_t k = 0;
  std::size_t m = 0;
  double sigma = 0.0;  // release-mode noise multiplier actually used
  StepMetrics step;
};

std::string metrics_header_line();
std::string to_jsonl(const MetricsRecord& record);
MetricsRecord parse_metrics_line(const std::string& line);

// Appends records to a file, writing the header first if the file is new
// or empty.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void write(const MetricsRecord& record);

 private:
  std::string path_;
  std::ofstream out_;
};

// Throws ParseError (with the line number) on a missing or mismatched
// header or a malformed record.
std::vector<MetricsRecord> read_metrics(const std::string& path);

}  // namespace gep

#endif  // GEP_METRICS_H_
