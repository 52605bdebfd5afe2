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

// Dense row-major matrix kernels used throughout the library: products,
// row orthonormalization, power iteration for anchor subspaces, projection,
// per-row clipping, stable rank and seeded Gaussian sampling.
//
// Every multiply-add performed by the product and orthonormalization
// kernels is tallied in a thread-local counter so that cost models can be
// checked against instrumented counts (see MacCounter).

#ifndef GEP_LINALG_H_
#define GEP_LINALG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace gep {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;
  // Zero-initialized rows x cols matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);
  // Takes ownership of row-major data; throws InvalidInput on size mismatch.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Appends one row; the first row appended to an empty 0x0 matrix fixes
  // the column count.
  void append_row(std::span<const double> values);

  // Columns [offset, offset + count) as a new matrix.
  DenseMatrix column_slice(std::size_t offset, std::size_t count) const;
  // Rows selected by index, in the given order.
  DenseMatrix select_rows(std::span<const std::size_t> indices) const;

  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Deterministic Gaussian/uniform source. Two streams built from the same
// (seed, stream_id) produce bit-identical draws.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  // Substream for one (step, purpose) pair of a training run.
  static RandomStream for_step(std::uint64_t seed, std::uint64_t step,
                               std::uint32_t purpose);

  double normal();
  double uniform();  // [0, 1)
  std::size_t uniform_index(std::size_t n);  // [0, n)

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Counts multiply-adds issued on the current thread between construction
// and count().
class MacCounter {
 public:
  MacCounter();
  std::uint64_t count() const;

 private:
  std::uint64_t start_;
};

namespace internal {
void add_macs(std::uint64_t n);
}  // namespace internal

// ---------------------------------------------------------------------------
// Products. Sums run sequentially over the inner index.

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);     // AB
DenseMatrix multiply_abt(const DenseMatrix& a, const DenseMatrix& b);  // ABᵀ
DenseMatrix multiply_atb(const DenseMatrix& a, const DenseMatrix& b);  // AᵀB
DenseMatrix transpose(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);
// Sum of rows in row order.
Vector column_sums(const DenseMatrix& a);

// ---------------------------------------------------------------------------
// Subspace operations.

struct OrthonormalRows {
  DenseMatrix rows;
  std::size_t effective_rank = 0;
};

// Modified Gram-Schmidt with one re-orthogonalization pass. A row is
// dropped when its norm after elimination falls below tol times its norm
// before elimination (zero rows are always dropped). Throws InvalidInput on non-finite input or
// tol <= 0.
OrthonormalRows orthonormalize_rows(const DenseMatrix& m, double tol = 1e-10);

struct BasisEstimate {
  DenseMatrix rows;             // k' x p, orthonormal
  std::size_t requested_k = 0;  // k after clamping to min(m, p)
  std::vector<std::string> warnings;
};

// Power method on anchor gradients G_a (m x p): B is initialized with
// i.i.d. standard Gaussian entries drawn from rng, then t times
// A = G_a Bᵀ, B = Aᵀ G_a, orthonormalize rows of B.
BasisEstimate power_iteration_basis(const DenseMatrix& anchor_grads,
                                    std::size_t k, std::size_t iterations,
                                    RandomStream& rng, double tol = 1e-10);

struct ProjectionSplit {
  DenseMatrix embedding;  // W = G Bᵀ, n x k
  DenseMatrix residual;   // R = G - W B, n x p
};

// Projects rows of g onto span(basis). An empty basis yields an n x 0
// embedding and R = G.
ProjectionSplit project_split(const DenseMatrix& g, const DenseMatrix& basis);

// Each row x becomes x * min(1, s / ‖x‖). Throws InvalidInput if s <= 0.
DenseMatrix clip_rows(const DenseMatrix& m, double s);
// Number of rows with norm strictly above s.
std::size_t count_rows_above(const DenseMatrix& m, double s);

// Largest singular value, by power iteration on the smaller Gram matrix to
// the given relative tolerance.
double spectral_norm(const DenseMatrix& m, double tol = 1e-6);

// ‖M‖_F² / ‖M‖₂². Throws UndefinedValue for a zero matrix.
double stable_rank(const DenseMatrix& m);

// i.i.d. N(0, sigma²) entries; sigma == 0 yields exact zeros without
// consuming draws. Throws InvalidInput if sigma < 0.
DenseMatrix gaussian_noise(std::size_t rows, std::size_t cols, double sigma,
                           RandomStream& rng);
Vector gaussian_vector(std::size_t n, double sigma, RandomStream& rng);

}  // namespace gep

#endif  // GEP_LINALG_H_
