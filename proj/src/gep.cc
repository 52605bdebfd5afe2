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

#include "gep/gep.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

void check_gradients(const DenseMatrix& g, const AnchorBasis& basis) {
  if (g.rows() == 0) throw InvalidInput("release: no private gradients");
  if (g.cols() != basis.dim()) {
    std::ostringstream msg;
    msg << "release: gradients have " << g.cols() << " columns, basis spans "
        << basis.dim();
    throw InvalidInput(msg.str());
  }
}

double mean_norm_ratio(const DenseMatrix& num, const DenseMatrix& den) {
  const double n = static_cast<double>(den.rows());
  Vector a = column_sums(num), b = column_sums(den);
  for (double& v : a) v /= n;
  for (double& v : b) v /= n;
  const double nb = norm(b);
  if (nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return norm(a) / nb;
}

}  // namespace

std::string to_string(ReleaseMode mode) {
  return mode == ReleaseMode::kSeparate ? "separate" : "joint";
}

std::string to_string(BasisMode mode) {
  return mode == BasisMode::kPower ? "power" : "random";
}

ReleaseMode parse_release_mode(const std::string& name) {
  if (name == "separate") return ReleaseMode::kSeparate;
  if (name == "joint") return ReleaseMode::kJoint;
  throw InvalidInput("unknown release mode '" + name + "'");
}

BasisMode parse_basis_mode(const std::string& name) {
  if (name == "power") return BasisMode::kPower;
  if (name == "random") return BasisMode::kRandom;
  throw InvalidInput("unknown basis mode '" + name + "'");
}

void GepConfig::validate() const {
  if (k == 0) throw InvalidInput("GepConfig: k must be >= 1");
  if (m == 0) throw InvalidInput("GepConfig: m must be >= 1");
  if (power_iterations == 0) throw InvalidInput("GepConfig: power iterations must be >= 1");
  if (!(clip_embedding > 0.0) || !(clip_residual > 0.0)) {
    throw InvalidInput("GepConfig: clipping thresholds must be > 0");
  }
  if (!(sigma >= 0.0)) throw InvalidInput("GepConfig: sigma must be >= 0 (calibrate first)");
}

double GepConfig::unit_sigma() const {
  return release == ReleaseMode::kSeparate ? sigma / std::sqrt(2.0) : sigma;
}

double GepConfig::sigma_for_mode(ReleaseMode mode, double unit_sigma) {
  return mode == ReleaseMode::kSeparate ? unit_sigma * std::sqrt(2.0) : unit_sigma;
}

// ---------------------------------------------------------------------------
// AnchorBasis

AnchorBasis::AnchorBasis(std::size_t dim, std::vector<GroupBasis> groups)
    : dim_(dim), groups_(std::move(groups)) {
  for (const auto& g : groups_) {
    if (g.offset + g.length > dim_) throw InvalidInput("AnchorBasis: group exceeds dimension");
    if (g.rows.rows() > 0 && g.rows.cols() != g.length) {
      throw InvalidInput("AnchorBasis: group basis width differs from group length");
    }
  }
}

AnchorBasis AnchorBasis::single(DenseMatrix rows) {
  const std::size_t dim = rows.cols();
  return AnchorBasis(dim, {GroupBasis{"all", 0, dim, std::move(rows)}});
}

AnchorBasis AnchorBasis::empty(std::size_t dim) {
  return AnchorBasis(dim, {GroupBasis{"all", 0, dim, DenseMatrix(0, dim)}});
}

std::size_t AnchorBasis::k() const {
  std::size_t k = 0;
  for (const auto& g : groups_) k += g.rows.rows();
  return k;
}

ProjectionSplit AnchorBasis::split(const DenseMatrix& g) const {
  if (g.cols() != dim_) throw InvalidInput("AnchorBasis::split: dimension mismatch");
  ProjectionSplit out{DenseMatrix(g.rows(), k()), g};
  std::size_t col = 0;
  for (const auto& grp : groups_) {
    const std::size_t kg = grp.rows.rows();
    if (kg == 0) continue;
    ProjectionSplit part = project_split(g.column_slice(grp.offset, grp.length), grp.rows);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      auto w = part.embedding.row(i);
      std::copy(w.begin(), w.end(), out.embedding.row(i).begin() + col);
      auto r = part.residual.row(i);
      std::copy(r.begin(), r.end(), out.residual.row(i).begin() + grp.offset);
    }
    col += kg;
  }
  return out;
}

Vector AnchorBasis::lift(std::span<const double> w) const {
  if (w.size() != k()) throw InvalidInput("AnchorBasis::lift: coordinate count mismatch");
  Vector out(dim_, 0.0);
  std::size_t col = 0;
  for (const auto& grp : groups_) {
    std::span<double> slice(out.data() + grp.offset, grp.length);
    for (std::size_t j = 0; j < grp.rows.rows(); ++j) {
      axpy(w[col + j], grp.rows.row(j), slice);
    }
    col += grp.rows.rows();
  }
  return out;
}

DenseMatrix AnchorBasis::dense() const {
  DenseMatrix out(k(), dim_);
  std::size_t r = 0;
  for (const auto& grp : groups_) {
    for (std::size_t j = 0; j < grp.rows.rows(); ++j, ++r) {
      auto src = grp.rows.row(j);
      std::copy(src.begin(), src.end(), out.row(r).begin() + grp.offset);
    }
  }
  return out;
}

AnchorBasis build_anchor_basis(DenseMatrix anchor_grads,
                               const GroupLayout& layout, const GepConfig& cfg,
                               RandomStream& rng,
                               std::vector<std::string>* warnings) {
  const std::size_t p = anchor_grads.cols();
  if (layout.num_params() != p) {
    throw InvalidInput("build_anchor_basis: layout covers " +
                       std::to_string(layout.num_params()) +
                       " parameters, anchor gradients have " + std::to_string(p));
  }
  std::vector<GroupBasis> groups;
  for (const ParamGroup& pg : layout.groups) {
    GroupBasis gb{pg.name, pg.offset, pg.length, DenseMatrix(0, pg.length)};
    if (pg.k == 0) {
      groups.push_back(std::move(gb));
      continue;
    }
    if (cfg.basis == BasisMode::kRandom) {
      const std::size_t kg = std::min(pg.k, pg.length);
      gb.rows = orthonormalize_rows(gaussian_noise(kg, pg.length, 1.0, rng)).rows;
    } else {
      if (warnings && anchor_grads.rows() < pg.k) {
        warnings->push_back("group '" + pg.name + "': m=" +
                            std::to_string(anchor_grads.rows()) + " < k_g=" +
                            std::to_string(pg.k));
      }
      BasisEstimate est = power_iteration_basis(
          anchor_grads.column_slice(pg.offset, pg.length), pg.k,
          cfg.power_iterations, rng);
      if (warnings) {
        warnings->insert(warnings->end(), est.warnings.begin(), est.warnings.end());
      }
      gb.rows = std::move(est.rows);
    }
    groups.push_back(std::move(gb));
  }
  return AnchorBasis(p, std::move(groups));
}

// ---------------------------------------------------------------------------
// Releases

PrivateRelease gep_release(const DenseMatrix& g, const AnchorBasis& basis,
                           const GepConfig& cfg, RandomStream& rng) {
  cfg.validate();
  check_gradients(g, basis);
  const double n = static_cast<double>(g.rows());
  ProjectionSplit split = basis.split(g);

  PrivateRelease rel;
  rel.k_effective = basis.k();
  rel.clipped_embedding_fraction =
      count_rows_above(split.embedding, cfg.clip_embedding) / n;
  rel.clipped_residual_fraction =
      count_rows_above(split.residual, cfg.clip_residual) / n;
  rel.projection_error_rate = mean_norm_ratio(split.residual, g);

  rel.embedding = column_sums(clip_rows(split.embedding, cfg.clip_embedding));
  rel.residual = column_sums(clip_rows(split.residual, cfg.clip_residual));

  const double mult = cfg.release == ReleaseMode::kJoint
                          ? std::sqrt(2.0) * cfg.sigma
                          : cfg.sigma;
  const Vector z1 = gaussian_vector(rel.embedding.size(), mult * cfg.clip_embedding, rng);
  const Vector z2 = gaussian_vector(rel.residual.size(), mult * cfg.clip_residual, rng);
  for (std::size_t j = 0; j < z1.size(); ++j) rel.embedding[j] += z1[j];
  for (std::size_t j = 0; j < z2.size(); ++j) rel.residual[j] += z2[j];

  rel.estimate = basis.lift(rel.embedding);
  for (std::size_t j = 0; j < rel.estimate.size(); ++j) {
    rel.estimate[j] = (rel.estimate[j] + rel.residual[j]) / n;
  }
  return rel;
}

PrivateRelease bgep_release(const DenseMatrix& g, const AnchorBasis& basis,
                            const GepConfig& cfg, RandomStream& rng) {
  cfg.validate();
  check_gradients(g, basis);
  const double n = static_cast<double>(g.rows());
  ProjectionSplit split = basis.split(g);

  PrivateRelease rel;
  rel.k_effective = basis.k();
  rel.clipped_embedding_fraction =
      count_rows_above(split.embedding, cfg.clip_embedding) / n;
  rel.projection_error_rate = mean_norm_ratio(split.residual, g);

  rel.embedding = column_sums(clip_rows(split.embedding, cfg.clip_embedding));
  const Vector z1 = gaussian_vector(rel.embedding.size(),
                                    cfg.unit_sigma() * cfg.clip_embedding, rng);
  for (std::size_t j = 0; j < z1.size(); ++j) rel.embedding[j] += z1[j];

  rel.estimate = basis.lift(rel.embedding);
  for (double& v : rel.estimate) v /= n;
  return rel;
}

Vector gp_release(const DenseMatrix& g, double clip, double sigma,
                  RandomStream& rng) {
  if (g.rows() == 0) throw InvalidInput("gp_release: no private gradients");
  if (!(sigma >= 0.0)) throw InvalidInput("gp_release: sigma must be >= 0");
  Vector sum = column_sums(clip_rows(g, clip));
  const Vector z = gaussian_vector(sum.size(), sigma * clip, rng);
  const double n = static_cast<double>(g.rows());
  for (std::size_t j = 0; j < sum.size(); ++j) sum[j] = (sum[j] + z[j]) / n;
  return sum;
}

double projection_error_rate(const DenseMatrix& g, const AnchorBasis& basis) {
  check_gradients(g, basis);
  const double rate = mean_norm_ratio(basis.split(g).residual, g);
  if (std::isnan(rate)) {
    throw UndefinedValue("projection_error_rate: mean gradient is zero");
  }
  return rate;
}

}  // namespace gep
