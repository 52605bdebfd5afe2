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

// CSV ingestion: header row required, one named label column, every other
// column is a numeric feature. Rows keep file order.

#ifndef GEP_CSV_H_
#define GEP_CSV_H_

#include <string>

#include "gep/linalg.h"
#include "gep/models.h"

namespace gep {

enum class Normalize { kNone, kStandardize };

std::string to_string(Normalize mode);
Normalize parse_normalize(const std::string& name);

// Per-feature affine map x -> (x - mean) * scale. A constant column gets
// scale 0, so it maps to zeros.
struct FeatureScaler {
  Vector mean;
  Vector scale;

  static FeatureScaler fit(const DenseMatrix& features);
  void apply(DenseMatrix& features) const;
};

// Throws ParseError naming the row/column on missing label column, a
// non-numeric cell, a ragged row or an empty file.
Dataset read_csv(const std::string& path, const std::string& label_column);

// read_csv, then (for kStandardize) standardizes with the file's own
// statistics. Evaluation splits should reuse the training scaler instead.
Dataset ingest_csv(const std::string& path, const std::string& label_column,
                   Normalize normalize, FeatureScaler* fitted = nullptr);

}  // namespace gep

#endif  // GEP_CSV_H_
