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

// CSV ingestion, run configs, metrics files and report tables.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gep/config.h"
#include "gep/csv.h"
#include "gep/errors.h"
#include "gep/metrics.h"
#include "gep/report.h"

namespace gep {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("gep_io_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const fs::path p = path_ / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// ---- csv ----

TEST(CsvTest, ReadsLabelColumnAnywhere) {
  TempDir tmp;
  const std::string path = tmp.file("a.csv", "x1,label,x2\n1.5,0,-2\n\n+3,1,4e-1\n");
  const Dataset d = read_csv(path, "label");
  ASSERT_EQ(d.size(), 2u);
  ASSERT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.features(0, 0), 1.5);
  EXPECT_EQ(d.features(0, 1), -2.0);
  EXPECT_EQ(d.features(1, 0), 3.0);
  EXPECT_EQ(d.features(1, 1), 0.4);
  EXPECT_EQ(d.labels, (Vector{0.0, 1.0}));
}

TEST(CsvTest, ErrorsNameTheProblem) {
  TempDir tmp;
  EXPECT_NE(error_of([&] { read_csv(tmp.file("missing.csv"), "label"); }).find("open"),
            std::string::npos);
  EXPECT_THROW(read_csv(tmp.file("empty.csv", "\n"), "label"), ParseError);
  EXPECT_NE(error_of([&] { read_csv(tmp.file("b.csv", "a,b\n1,2\n"), "y"); }).find("'y'"),
            std::string::npos);
  EXPECT_THROW(read_csv(tmp.file("c.csv", "a,b\n1,2,3\n"), "a"), ParseError);
  const std::string bad = error_of([&] { read_csv(tmp.file("d.csv", "a,b\n1,2\n3,x\n"), "a"); });
  EXPECT_NE(bad.find("line 3"), std::string::npos) << bad;
  EXPECT_NE(bad.find("'b'"), std::string::npos) << bad;
  EXPECT_THROW(read_csv(tmp.file("e.csv", "a,b\n"), "a"), ParseError);
  EXPECT_THROW(read_csv(tmp.file("f.csv", "a,a\n1,2\n"), "a"), ParseError);
}

TEST(CsvTest, StandardizeUsesTrainStatistics) {
  TempDir tmp;
  const std::string path = tmp.file("g.csv", "label,x,c\n0,1,5\n1,3,5\n0,5,5\n");
  FeatureScaler scaler;
  const Dataset d = ingest_csv(path, "label", Normalize::kStandardize, &scaler);
  // Column x has mean 3 and population sd sqrt(8/3); c is constant.
  const double sd = std::sqrt(8.0 / 3.0);
  EXPECT_NEAR(d.features(0, 0), -2.0 / sd, 1e-15);
  EXPECT_NEAR(d.features(2, 0), 2.0 / sd, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(d.features(i, 1), 0.0);
  DenseMatrix other{{7.0, 1.0}};
  scaler.apply(other);
  EXPECT_NEAR(other(0, 0), 4.0 / sd, 1e-15);
  EXPECT_EQ(other(0, 1), 0.0);
  EXPECT_EQ(parse_normalize("per-feature-standardize"), Normalize::kStandardize);
  EXPECT_THROW(parse_normalize("minmax"), InvalidInput);
}

// ---- config ----

TEST(ConfigTest, DefaultsRoundTrip) {
  const RunConfig def;
  EXPECT_EQ(parse_run_config(emit_run_config(def)), def);
}

TEST(ConfigTest, EveryKeyIsEmittedAndParsed) {
  RunConfig cfg;
  cfg.name = "sweep";
  cfg.seeds = {3, 4};
  cfg.methods = {Method::kGep, Method::kGp, Method::kRandomBasisGep};
  cfg.calibration = Calibration::kClosedForm;
  cfg.synth_kind = SynthKind::kLowRankGradientTask;
  cfg.synth.rank = 7;
  cfg.synth.spectrum_decay = 0.1 + 0.2;  // not exactly representable in short form
  cfg.model = ModelKind::kMlp;
  cfg.hidden = {32, 16};
  cfg.k = {10, 20};
  cfg.release = ReleaseMode::kSeparate;
  cfg.epsilon = {1.0 / 3.0, 8.0};
  cfg.sigma = 1.25;
  cfg.lr_decay = false;
  cfg.aux_labels = AuxLabelMode::kFixed;
  const std::string text = emit_run_config(cfg);
  for (const std::string& key : run_config_keys()) {
    EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  }
  EXPECT_EQ(parse_run_config(text), cfg);
}

TEST(ConfigTest, SigmaAutoMeansCalibrate) {
  EXPECT_FALSE(parse_run_config("privacy.sigma = auto\n").sigma.has_value());
  EXPECT_EQ(*parse_run_config("privacy.sigma = 0\n").sigma, 0.0);
}

TEST(ConfigTest, ErrorsNameKeyAndLine) {
  const std::string unknown = error_of([] { parse_run_config("# c\n\ntrain.stepz = 3\n"); });
  EXPECT_NE(unknown.find("train.stepz"), std::string::npos);
  EXPECT_NE(unknown.find("line 3"), std::string::npos);
  EXPECT_THROW(parse_run_config("train.steps = 1\ntrain.steps = 2\n"), ConfigError);
  EXPECT_NE(error_of([] { parse_run_config("train.lr = fast\n"); }).find("'fast'"),
            std::string::npos);
  EXPECT_THROW(parse_run_config("train.steps\n"), ConfigError);
  EXPECT_THROW(parse_run_config("privacy.delta = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("model.kind = mlp\n"), ConfigError);
  EXPECT_THROW(parse_run_config("data.source = csv\n"), ConfigError);
  EXPECT_THROW(parse_run_config("run.methods = gep,sgd\n"), ConfigError);
}

TEST(ConfigTest, PathsResolveAgainstConfigDirectory) {
  const RunConfig cfg =
      parse_run_config("data.source = csv\ndata.train_csv = d/train.csv\n", "/base/cfg");
  EXPECT_EQ(cfg.train_csv, "/base/cfg/d/train.csv");
  const RunConfig abs = parse_run_config("data.source = csv\ndata.train_csv = /x.csv\n", "/b");
  EXPECT_EQ(abs.train_csv, "/x.csv");
}

// ---- metrics ----

MetricsRecord sample_record(std::int64_t step, double acc) {
  MetricsRecord r;
  r.run_id = "r-gep";
  r.method = "gep";
  r.seed = 2;
  r.epsilon = 8.0;
  r.delta = 1e-5;
  r.k = 20;
  r.m = 200;
  r.sigma = 11.996314780120;
  r.step.step = step;
  r.step.batch_size = 1000;
  r.step.train_loss = 0.1 + 0.2;
  r.step.eval_loss = 0.25;
  r.step.eval_accuracy = acc;
  r.step.projection_error_rate = 1.0 / 3.0;
  r.step.k_effective = 20;
  r.step.epsilon_spent = 4.0;
  return r;
}

bool same(const MetricsRecord& a, const MetricsRecord& b) {
  auto eq = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.run_id == b.run_id && a.method == b.method && a.seed == b.seed &&
         a.epsilon == b.epsilon && a.delta == b.delta && a.k == b.k && a.m == b.m &&
         a.sigma == b.sigma && a.step.step == b.step.step &&
         a.step.batch_size == b.step.batch_size && eq(a.step.train_loss, b.step.train_loss) &&
         eq(a.step.eval_loss, b.step.eval_loss) && eq(a.step.eval_accuracy, b.step.eval_accuracy) &&
         eq(a.step.projection_error_rate, b.step.projection_error_rate) &&
         a.step.k_effective == b.step.k_effective && a.step.epsilon_spent == b.step.epsilon_spent;
}

TEST(MetricsTest, LineRoundTripIsExact) {
  const MetricsRecord r = sample_record(7, 0.9125);
  EXPECT_TRUE(same(parse_metrics_line(to_jsonl(r)), r));
  MetricsRecord nan = r;
  nan.step.eval_accuracy = std::numeric_limits<double>::quiet_NaN();
  const std::string line = to_jsonl(nan);
  EXPECT_NE(line.find("null"), std::string::npos);
  EXPECT_TRUE(same(parse_metrics_line(line), nan));
}

TEST(MetricsTest, WriterEmitsHeaderOnce) {
  TempDir tmp;
  const std::string path = tmp.file("m.jsonl");
  {
    MetricsWriter w(path);
    w.write(sample_record(1, 0.5));
  }
  {
    MetricsWriter w(path);
    w.write(sample_record(2, 0.6));
  }
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, metrics_header_line());
  const std::vector<MetricsRecord> back = read_metrics(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].step.step, 2);
}

TEST(MetricsTest, BadLinesReportLineNumber) {
  TempDir tmp;
  const std::string path =
      tmp.file("bad.jsonl", metrics_header_line() + "\n" + to_jsonl(sample_record(1, 0.5)) +
                                "\n{\"run_id\": 3\n");
  const std::string msg = error_of([&] { read_metrics(path); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

// ---- report ----

TEST(ReportTest, UsesLastStepPerRunAndSampleStd) {
  std::vector<MetricsRecord> recs;
  for (int seed = 0; seed < 3; ++seed) {
    for (int step = 1; step <= 2; ++step) {
      MetricsRecord r = sample_record(step, step == 2 ? 0.80 + 0.05 * seed : 0.1);
      r.run_id = "gep-s" + std::to_string(seed);
      r.seed = seed;
      recs.push_back(r);
    }
  }
  MetricsRecord gp = sample_record(2, 0.7);
  gp.run_id = "gp-s0";
  gp.method = "gp";
  gp.k = gp.m = 0;
  recs.push_back(gp);

  const std::vector<SummaryRow> rows = summarize(recs);
  ASSERT_EQ(rows.size(), 2u);
  const SummaryRow& g = rows[0].method == "gep" ? rows[0] : rows[1];
  EXPECT_EQ(g.runs, 3u);
  EXPECT_NEAR(g.accuracy_mean, 0.85, 1e-12);
  EXPECT_NEAR(g.accuracy_std, 0.05, 1e-12);  // sample std of {0.80, 0.85, 0.90}

  const std::string table = format_method_epsilon_table(rows);
  EXPECT_NE(table.find("| gep "), std::string::npos) << table;
  EXPECT_NE(table.find("85.00 +- 5.00"), std::string::npos) << table;
  EXPECT_NE(table.find("70.00 +- 0.00"), std::string::npos) << table;
  EXPECT_EQ(format_k_sweep_table(rows), "");
}

TEST(ReportTest, KSweepTableListsEachK) {
  std::vector<MetricsRecord> recs;
  for (std::size_t k : {10u, 40u}) {
    MetricsRecord r = sample_record(1, k == 10 ? 0.6 : 0.7);
    r.k = k;
    r.run_id = "gep-k" + std::to_string(k);
    recs.push_back(r);
  }
  const std::string table = format_k_sweep_table(summarize(recs));
  EXPECT_NE(table.find("k=10"), std::string::npos) << table;
  EXPECT_NE(table.find("k=40"), std::string::npos) << table;
}

TEST(ReportTest, ReadsDirectoryInNameOrder) {
  TempDir tmp;
  for (const char* name : {"b.jsonl", "a.jsonl"}) {
    MetricsRecord r = sample_record(1, 0.5);
    r.run_id = name;
    MetricsWriter(tmp.file(name)).write(r);
  }
  tmp.file("notes.txt", "ignored\n");
  const std::vector<MetricsRecord> recs = read_metrics_dir(tmp.path().string());
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].run_id, "a.jsonl");
}

}  // namespace
}  // namespace gep
