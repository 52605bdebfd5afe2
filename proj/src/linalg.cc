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

#include "gep/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

thread_local std::uint64_t mac_count = 0;

void require_same_cols(const DenseMatrix& a, const DenseMatrix& b,
                       const char* op) {
  if (a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << op << ": column mismatch (" << a.rows() << "x" << a.cols()
        << " vs " << b.rows() << "x" << b.cols() << ")";
    throw InvalidInput(msg.str());
  }
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
  internal::add_macs(x.size());
}

}  // namespace

namespace internal {
void add_macs(std::uint64_t n) { mac_count += n; }
}  // namespace internal

MacCounter::MacCounter() : start_(mac_count) {}
std::uint64_t MacCounter::count() const { return mac_count - start_; }

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    std::ostringstream msg;
    msg << "DenseMatrix: " << rows << "x" << cols << " needs " << rows * cols
        << " values, got " << data_.size();
    throw InvalidInput(msg.str());
  }
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) {
    append_row(std::span<const double>(r.begin(), r.size()));
  }
}

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw InvalidInput("append_row: expected " + std::to_string(cols_) +
                       " values, got " + std::to_string(values.size()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

DenseMatrix DenseMatrix::column_slice(std::size_t offset,
                                      std::size_t count) const {
  if (offset + count > cols_) {
    throw InvalidInput("column_slice: range exceeds column count");
  }
  DenseMatrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto src = row(r).subspan(offset, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

DenseMatrix DenseMatrix::select_rows(
    std::span<const std::size_t> indices) const {
  DenseMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw InvalidInput("select_rows: index out of range");
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// RandomStream

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

RandomStream RandomStream::for_step(std::uint64_t seed, std::uint64_t step,
                                    std::uint32_t purpose) {
  return RandomStream(seed, (step << 8) | (purpose & 0xffu));
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::uniform() {
  return std::generate_canonical<double, 53>(engine_);
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

// ---------------------------------------------------------------------------
// Products

double dot(std::span<const double> a, std::span<const double> b) {
  // Four independent partial sums; fixed order, so still deterministic.
  const std::size_t n = a.size();
  const std::size_t n4 = n - n % 4;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n4; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (std::size_t i = n4; i < n; ++i) s0 += a[i] * b[i];
  internal::add_macs(n);
  return (s0 + s1) + (s2 + s3);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  internal::add_macs(x.size());
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("multiply: inner dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      axpy(a(i, l), b.row(l), out.row(i));
    }
  }
  return out;
}

DenseMatrix multiply_abt(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_cols(a, b, "multiply_abt");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      out(i, j) = dot(a.row(i), b.row(j));
    }
  }
  return out;
}

DenseMatrix multiply_atb(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("multiply_atb: row count mismatch");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      axpy(a(i, j), b.row(i), out.row(j));
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

Vector column_sums(const DenseMatrix& a) {
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subspace operations

OrthonormalRows orthonormalize_rows(const DenseMatrix& m, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("orthonormalize_rows: tol must be > 0");
  if (!m.all_finite()) throw InvalidInput("orthonormalize_rows: non-finite input");

  OrthonormalRows out;
  out.rows = DenseMatrix(0, 0);
  std::vector<double> kept;
  std::size_t rank = 0;
  const std::size_t p = m.cols();
  Vector v(p);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto src = m.row(i);
    std::copy(src.begin(), src.end(), v.begin());
    const double before = norm(v);
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < rank; ++j) {
        std::span<const double> q(kept.data() + j * p, p);
        axpy(-dot(q, v), q, v);
      }
    }
    const double after = norm(v);
    if (!(after > tol * before)) continue;
    scale(1.0 / after, v);
    kept.insert(kept.end(), v.begin(), v.end());
    ++rank;
  }
  out.rows = DenseMatrix(rank, p, std::move(kept));
  out.effective_rank = rank;
  return out;
}

BasisEstimate power_iteration_basis(const DenseMatrix& anchor_grads,
                                    std::size_t k, std::size_t iterations,
                                    RandomStream& rng, double tol) {
  if (k == 0) throw InvalidInput("power_iteration_basis: k must be >= 1");
  if (iterations == 0) {
    throw InvalidInput("power_iteration_basis: iterations must be >= 1");
  }
  if (!anchor_grads.all_finite()) {
    throw InvalidInput("power_iteration_basis: non-finite anchor gradients");
  }
  BasisEstimate est;
  const std::size_t m = anchor_grads.rows();
  const std::size_t p = anchor_grads.cols();
  const std::size_t limit = std::min(m, p);
  est.requested_k = std::min(k, limit);
  if (k > limit) {
    std::ostringstream msg;
    msg << "power_iteration_basis: k=" << k << " exceeds min(m, p)=" << limit
        << "; clamped";
    est.warnings.push_back(msg.str());
  }
  if (est.requested_k == 0) {
    est.rows = DenseMatrix(0, p);
    return est;
  }

  DenseMatrix basis = gaussian_noise(est.requested_k, p, 1.0, rng);
  for (std::size_t it = 0; it < iterations; ++it) {
    const DenseMatrix a = multiply_abt(anchor_grads, basis);  // m x k
    basis = orthonormalize_rows(multiply_atb(a, anchor_grads), tol).rows;
    if (basis.rows() == 0) break;
  }
  if (basis.rows() == 0) basis = DenseMatrix(0, p);
  est.rows = std::move(basis);
  return est;
}

ProjectionSplit project_split(const DenseMatrix& g, const DenseMatrix& basis) {
  if (basis.rows() == 0) {
    if (basis.cols() != 0 && basis.cols() != g.cols()) {
      throw InvalidInput("project_split: basis/gradient column mismatch");
    }
    return {DenseMatrix(g.rows(), 0), g};
  }
  require_same_cols(g, basis, "project_split");
  ProjectionSplit out;
  out.embedding = multiply_abt(g, basis);
  out.residual = g;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < basis.rows(); ++j) {
      axpy(-out.embedding(i, j), basis.row(j), out.residual.row(i));
    }
  }
  return out;
}

DenseMatrix clip_rows(const DenseMatrix& m, double s) {
  if (!(s > 0.0)) throw InvalidInput("clip_rows: threshold must be > 0");
  DenseMatrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    double n = norm(r);
    if (n <= s) continue;
    double factor = s / n;
    if (!std::isfinite(n)) {
      double big = 0.0;
      for (double v : r) {
        if (!std::isfinite(v)) throw InvalidInput("clip_rows: non-finite entry in row " + std::to_string(i));
        big = std::max(big, std::abs(v));
      }
      double scaled = 0.0;
      for (double v : r) scaled += (v / big) * (v / big);
      factor = (s / big) / std::sqrt(scaled);
    }
    // Rounding in the rescale can overshoot s by an ulp; step the factor
    // down until the clipped norm is within the threshold.
    auto src = m.row(i);
    for (;;) {
      for (std::size_t j = 0; j < r.size(); ++j) r[j] = src[j] * factor;
      if (norm(r) <= s) break;
      factor = std::nextafter(factor, 0.0);
    }
  }
  return out;
}

std::size_t count_rows_above(const DenseMatrix& m, double s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (norm(m.row(i)) > s) ++count;
  }
  return count;
}

double spectral_norm(const DenseMatrix& m, double tol) {
  if (m.empty()) return 0.0;
  const DenseMatrix gram = m.rows() <= m.cols() ? multiply_abt(m, m)
                                                : multiply_atb(m, m);
  const std::size_t d = gram.rows();
  RandomStream rng(0x5eedULL, 0);
  Vector v(d), w(d);
  for (double& x : v) x = rng.normal();
  double nv = norm(v);
  for (double& x : v) x /= nv;

  double lambda = 0.0;
  constexpr int kMaxIterations = 20000;
  for (int it = 0; it < kMaxIterations; ++it) {
    for (std::size_t i = 0; i < d; ++i) w[i] = dot(gram.row(i), v);
    const double next = dot(v, w);  // Rayleigh quotient
    const double nw = norm(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(next - lambda) <= 1e-2 * tol * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double stable_rank(const DenseMatrix& m) {
  const double fro = frobenius_norm(m);
  if (fro == 0.0) throw UndefinedValue("stable_rank: zero matrix");
  const double spec = spectral_norm(m);
  const double ratio = (fro * fro) / (spec * spec);
  // The Rayleigh quotient underestimates ‖M‖₂ slightly before convergence.
  return std::clamp(ratio, 1.0,
                    static_cast<double>(std::min(m.rows(), m.cols())));
}

DenseMatrix gaussian_noise(std::size_t rows, std::size_t cols, double sigma,
                           RandomStream& rng) {
  if (!(sigma >= 0.0)) throw InvalidInput("gaussian_noise: sigma must be >= 0");
  DenseMatrix out(rows, cols);
  if (sigma == 0.0) return out;
  for (double& v : out.data()) v = sigma * rng.normal();
  return out;
}

Vector gaussian_vector(std::size_t n, double sigma, RandomStream& rng) {
  if (!(sigma >= 0.0)) throw InvalidInput("gaussian_vector: sigma must be >= 0");
  Vector out(n, 0.0);
  if (sigma == 0.0) return out;
  for (double& v : out) v = sigma * rng.normal();
  return out;
}

}  // namespace gep
