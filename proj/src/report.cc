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

#include "gep/report.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "gep/errors.h"

namespace gep {
namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  sd = 0.0;
  if (xs.size() > 1) {
    for (double x : xs) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
  }
}

std::string fmt_eps(double e) {
  std::ostringstream s;
  s << e;
  return s.str();
}

std::string cell(const SummaryRow& r) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  if (std::isnan(r.accuracy_mean)) {
    s.precision(4);
    s << r.loss_mean << " +- " << r.loss_std << " (loss)";
  } else {
    s.precision(2);
    s << 100.0 * r.accuracy_mean << " +- " << 100.0 * r.accuracy_std;
  }
  return s.str();
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : body) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    out << "|";
    for (std::size_t c = 0; c < header.size(); ++c) {
      const std::string v = c < row.size() ? row[c] : "";
      out << " " << v << std::string(width[c] - v.size(), ' ') << " |";
    }
    out << "\n";
  };
  line(header);
  out << "|";
  for (std::size_t w : width) out << std::string(w + 2, '-') << "|";
  out << "\n";
  for (const auto& row : body) line(row);
  return out.str();
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records) {
  std::map<std::string, const MetricsRecord*> last;
  for (const MetricsRecord& r : records) {
    auto it = last.find(r.run_id);
    if (it == last.end() || r.step.step >= it->second->step.step) last[r.run_id] = &r;
  }
  using Key = std::tuple<std::string, double, std::size_t, std::size_t>;
  std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& [id, r] : last) {
    auto& g = groups[Key{r->method, r->epsilon, r->k, r->m}];
    g.first.push_back(r->step.eval_accuracy);
    g.second.push_back(r->step.eval_loss);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, vals] : groups) {
    SummaryRow row;
    std::tie(row.method, row.epsilon, row.k, row.m) = key;
    row.runs = vals.first.size();
    mean_std(vals.first, row.accuracy_mean, row.accuracy_std);
    mean_std(vals.second, row.loss_mean, row.loss_std);
    rows.push_back(row);
  }
  return rows;
}

std::string format_method_epsilon_table(const std::vector<SummaryRow>& rows) {
  std::set<double> eps;
  std::set<std::pair<std::size_t, std::size_t>> km;
  for (const SummaryRow& r : rows) {
    eps.insert(r.epsilon);
    if (r.method != "gp") km.insert({r.k, r.m});
  }
  const bool show_km = km.size() > 1;
  std::vector<std::string> header = {"method"};
  for (double e : eps) header.push_back("eps=" + fmt_eps(e));
  std::map<std::string, std::vector<std::string>> by_label;
  std::vector<std::string> order;
  for (const SummaryRow& r : rows) {
    std::string label = r.method;
    if (show_km && r.method != "gp") {
      label += " (k=" + std::to_string(r.k) + ", m=" + std::to_string(r.m) + ")";
    }
    auto [it, fresh] = by_label.try_emplace(label, std::vector<std::string>(eps.size() + 1));
    if (fresh) {
      it->second[0] = label;
      order.push_back(label);
    }
    const std::size_t col =
        1 + static_cast<std::size_t>(std::distance(eps.begin(), eps.find(r.epsilon)));
    it->second[col] = cell(r);
  }
  std::vector<std::vector<std::string>> body;
  for (const std::string& label : order) body.push_back(by_label[label]);
  return render(header, body);
}

std::string format_k_sweep_table(const std::vector<SummaryRow>& rows) {
  std::set<std::size_t> ks;
  for (const SummaryRow& r : rows) {
    if (r.method != "gp") ks.insert(r.k);
  }
  if (ks.size() < 2) return "";
  std::vector<std::string> header = {"method", "epsilon"};
  for (std::size_t k : ks) header.push_back("k=" + std::to_string(k));
  std::map<std::pair<std::string, double>, std::vector<std::string>> table;
  for (const SummaryRow& r : rows) {
    if (r.method == "gp") continue;
    auto [it, fresh] =
        table.try_emplace({r.method, r.epsilon}, std::vector<std::string>(ks.size() + 2));
    if (fresh) {
      it->second[0] = r.method;
      it->second[1] = fmt_eps(r.epsilon);
    }
    const std::size_t col = 2 + static_cast<std::size_t>(std::distance(ks.begin(), ks.find(r.k)));
    it->second[col] = cell(r);
  }
  std::vector<std::vector<std::string>> body;
  for (auto& [key, row] : table) body.push_back(row);
  return render(header, body);
}

std::vector<MetricsRecord> read_metrics_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("metrics directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<MetricsRecord> out;
  for (const fs::path& f : files) {
    std::vector<MetricsRecord> recs = read_metrics(f.string());
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

}  // namespace gep
