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

#include "gep/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "gep/errors.h"

namespace gep {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      return out;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string where(const std::string& path, std::size_t row, std::size_t col,
                  const std::string& name) {
  std::ostringstream s;
  s << path << ": line " << row << ", column " << col << " ('" << name << "')";
  return s.str();
}

}  // namespace

std::string to_string(Normalize mode) {
  return mode == Normalize::kNone ? "none" : "standardize";
}

Normalize parse_normalize(const std::string& name) {
  if (name == "none") return Normalize::kNone;
  if (name == "standardize" || name == "per-feature-standardize") {
    return Normalize::kStandardize;
  }
  throw InvalidInput("unknown normalization '" + name + "'");
}

FeatureScaler FeatureScaler::fit(const DenseMatrix& features) {
  const std::size_t n = features.rows(), d = features.cols();
  FeatureScaler s{Vector(d, 0.0), Vector(d, 0.0)};
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += features(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  Vector var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = features(i, j) - s.mean[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    s.scale[j] = sd > 0.0 ? 1.0 / sd : 0.0;
  }
  return s;
}

void FeatureScaler::apply(DenseMatrix& features) const {
  if (features.cols() != mean.size()) {
    throw InvalidInput("FeatureScaler: feature count mismatch");
  }
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
      features(i, j) = (features(i, j) - mean[j]) * scale[j];
    }
  }
}

Dataset read_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw ParseError(path + ": empty file (no header row)");

  std::size_t label_idx = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column) {
      if (label_idx != header.size()) {
        throw ParseError(path + ": label column '" + label_column + "' appears twice");
      }
      label_idx = c;
    }
  }
  if (label_idx == header.size()) {
    throw ParseError(path + ": label column '" + label_column + "' not found in header");
  }

  const std::size_t d = header.size() - 1;
  Dataset out{DenseMatrix(0, d), {}, path};
  Vector row(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream s;
      s << path << ": line " << line_no << " has " << fields.size() << " fields, header has "
        << header.size();
      throw ParseError(s.str());
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      double v = 0.0;
      const char* first = f.data();
      if (f.size() > 1 && f[0] == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(where(path, line_no, c + 1, header[c]) + ": non-numeric cell '" + f +
                         "'");
      }
      if (c == label_idx) {
        out.labels.push_back(v);
      } else {
        row[j++] = v;
      }
    }
    out.features.append_row(row);
  }
  if (out.size() == 0) throw ParseError(path + ": no data rows");
  return out;
}

Dataset ingest_csv(const std::string& path, const std::string& label_column,
                   Normalize normalize, FeatureScaler* fitted) {
  Dataset ds = read_csv(path, label_column);
  if (normalize == Normalize::kStandardize) {
    const FeatureScaler s = FeatureScaler::fit(ds.features);
    s.apply(ds.features);
    if (fitted != nullptr) *fitted = s;
  }
  return ds;
}

}  // namespace gep
