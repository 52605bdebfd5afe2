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

// Gradient embedding perturbation.
//
// Private per-sample gradients are split into their coordinates in an
// anchor subspace (estimated from public anchor gradients) and a residual
// orthogonal to it. Both parts are clipped with separate thresholds,
// summed, perturbed with Gaussian noise and recombined into an unbiased
// estimate of the mean gradient. The biased variant (embedding only), plain
// gradient perturbation and a random-subspace baseline are provided for
// comparison.

#ifndef GEP_GEP_H_
#define GEP_GEP_H_

#include <cstddef>
#include <string>
#include <vector>

#include "gep/linalg.h"
#include "gep/models.h"

namespace gep {

// How the embedding and residual sums are perturbed.
//  kSeparate: two Gaussian releases with standard deviations sigma * S1 and
//             sigma * S2, where sigma is calibrated for both releases
//             together (per-step RDP of order a is a / sigma²).
//  kJoint:    the normalized sums [w / S1; r / S2] are released as one vector
//             with sensitivity sqrt(2): each block receives standard
//             deviation sqrt(2) * sigma * S_block and sigma is the
//             unit-sensitivity multiplier (per-step RDP a / (2 sigma²)).
enum class ReleaseMode { kSeparate, kJoint };
enum class BasisMode { kPower, kRandom };

std::string to_string(ReleaseMode mode);
std::string to_string(BasisMode mode);
ReleaseMode parse_release_mode(const std::string& name);
BasisMode parse_basis_mode(const std::string& name);

struct GepConfig {
  std::size_t k = 100;
  std::size_t m = 200;
  std::size_t power_iterations = 1;
  double clip_embedding = 10.0;  // S1
  double clip_residual = 2.0;    // S2
  ReleaseMode release = ReleaseMode::kJoint;
  BasisMode basis = BasisMode::kPower;
  double sigma = 0.0;

  // Throws InvalidInput for non-positive thresholds, k == 0, m == 0 or
  // sigma < 0.
  void validate() const;
  // Multiplier of a single unit-sensitivity Gaussian release with the same
  // per-step privacy cost as this configuration.
  double unit_sigma() const;
  // Converts a unit-sensitivity multiplier into this mode's sigma.
  static double sigma_for_mode(ReleaseMode mode, double unit_sigma);

  friend bool operator==(const GepConfig&, const GepConfig&) = default;
};

struct GroupBasis {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
  DenseMatrix rows;  // k_g x length, orthonormal
};

// Block-diagonal orthonormal basis: each group's rows act only on that
// group's slice of the parameter vector.
class AnchorBasis {
 public:
  AnchorBasis() = default;
  AnchorBasis(std::size_t dim, std::vector<GroupBasis> groups);

  // Unpartitioned basis over all dim coordinates.
  static AnchorBasis single(DenseMatrix rows);
  static AnchorBasis empty(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t k() const;
  const std::vector<GroupBasis>& groups() const { return groups_; }

  // Embedding W = G Bᵀ and residual R = G - W B, group by group.
  ProjectionSplit split(const DenseMatrix& g) const;
  // wᵀ B for a length-k coordinate vector.
  Vector lift(std::span<const double> w) const;
  // The full k x dim matrix B with zeros outside each group's block.
  DenseMatrix dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<GroupBasis> groups_;
};

// Per-group power iteration (or orthonormalized Gaussian rows in random
// mode) over the group's column slice of the anchor gradients. The anchor
// gradients are taken by value and released when the call returns.
// Warnings (k clamping, m < k_g) are appended to `warnings` when non-null.
AnchorBasis build_anchor_basis(DenseMatrix anchor_grads,
                               const GroupLayout& layout, const GepConfig& cfg,
                               RandomStream& rng,
                               std::vector<std::string>* warnings = nullptr);

struct PrivateRelease {
  Vector estimate;        // ṽ (or ũ for the biased variant)
  Vector embedding;       // w̃, length k
  Vector residual;        // r̃, length p (empty for the biased variant)
  std::size_t k_effective = 0;
  double clipped_embedding_fraction = 0.0;
  double clipped_residual_fraction = 0.0;
  // ‖r/n‖ / ‖g‖ from unclipped quantities (NaN when g = 0). Diagnostic
  // only: computed from private data without noise, never to be published.
  double projection_error_rate = 0.0;
};

// Full release: ṽ = (w̃ᵀB + r̃) / n with w = Σ clip(W, S1), r = Σ clip(R, S2).
PrivateRelease gep_release(const DenseMatrix& g, const AnchorBasis& basis,
                           const GepConfig& cfg, RandomStream& rng);

// Embedding-only release: ũ = w̃ᵀB / n, with w̃ = w + N(0, (unit_sigma S1)²).
PrivateRelease bgep_release(const DenseMatrix& g, const AnchorBasis& basis,
                            const GepConfig& cfg, RandomStream& rng);

// Gradient perturbation: (Σ clip(G, S) + N(0, (sigma S)² I)) / n.
Vector gp_release(const DenseMatrix& g, double clip, double sigma,
                  RandomStream& rng);

// ‖(1/n) Σ R_i‖ / ‖(1/n) Σ G_i‖. Throws UndefinedValue when the mean
// gradient is zero.
double projection_error_rate(const DenseMatrix& g, const AnchorBasis& basis);

}  // namespace gep

#endif  // GEP_GEP_H_
