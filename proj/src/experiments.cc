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

#include "gep/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

Dataset with_random_labels(Dataset ds, std::size_t classes, RandomStream& rng) {
  for (double& y : ds.labels) {
    y = classes == 0 ? rng.normal() : static_cast<double>(rng.uniform_index(classes));
  }
  return ds;
}

std::vector<std::size_t> first_n(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : s / static_cast<double>(xs.size());
}

}  // namespace

std::string to_string(AnchorSource s) {
  switch (s) {
    case AnchorSource::kHeldOutRandomLabels: return "heldout-random";
    case AnchorSource::kHeldOutCorrectLabels: return "heldout-correct";
    case AnchorSource::kSynthetic: return "synthetic";
  }
  return "unknown";
}

AnchorSource parse_anchor_source(const std::string& name) {
  if (name == "heldout-random") return AnchorSource::kHeldOutRandomLabels;
  if (name == "heldout-correct") return AnchorSource::kHeldOutCorrectLabels;
  if (name == "synthetic") return AnchorSource::kSynthetic;
  throw InvalidInput("unknown anchor source '" + name + "'");
}

ModelSpec GradientTask::make_model(RandomStream& rng) const {
  const std::size_t d = params.dim;
  const std::size_t classes = kind == SynthKind::kGaussianMixture ? params.classes : 2;
  ModelSpec spec = ModelSpec::linear(d);
  switch (model) {
    case ModelKind::kLinear: spec = ModelSpec::linear(d); break;
    case ModelKind::kLogistic: spec = ModelSpec::logistic(d, classes); break;
    case ModelKind::kMlp: spec = ModelSpec::mlp(d, hidden, classes); break;
  }
  if (init_scale > 0.0) spec.init_random(rng, init_scale);
  return spec;
}

GradientTask approx_low_rank_task() {
  GradientTask t;
  t.kind = SynthKind::kLowRankGradientTask;
  t.params.dim = 199;
  t.params.rank = 200;
  t.params.spectrum_decay = 1.5;
  t.params.label_noise = 0.1;
  t.n_private = 500;
  t.model = ModelKind::kLinear;
  return t;
}

GradientTask exact_low_rank_task(std::size_t rank, std::size_t params) {
  if (params < 2) throw InvalidInput("exact_low_rank_task: need at least 2 parameters");
  GradientTask t;
  t.kind = SynthKind::kLowRankGradientTask;
  t.params.dim = params - 1;
  t.params.rank = rank;
  t.params.label_noise = 0.1;
  t.n_private = 200;
  t.model = ModelKind::kLinear;
  return t;
}

GradientTask reference_mlp_task() {
  GradientTask t;
  t.kind = SynthKind::kGaussianMixture;
  t.params.dim = 20;
  t.params.classes = 3;
  t.params.separation = 4.0;
  t.params.cluster_sd = 0.3;
  t.params.label_noise = 0.0;
  t.n_private = 200;
  t.model = ModelKind::kMlp;
  t.hidden = {64};
  t.init_scale = 1.0;
  return t;
}

double ProjectionPoint::mean() const { return mean_of(errors); }

double ProjectionPoint::stddev() const {
  if (errors.size() < 2) return 0.0;
  const double mu = mean();
  double s = 0.0;
  for (double e : errors) s += (e - mu) * (e - mu);
  return std::sqrt(s / static_cast<double>(errors.size() - 1));
}

std::vector<ProjectionPoint> projection_error_sweep(const ProjectionSweepConfig& cfg) {
  if (cfg.ks.empty() || cfg.ms.empty() || cfg.bases.empty() || cfg.sources.empty() ||
      cfg.trials == 0) {
    throw InvalidInput("projection_error_sweep: empty sweep");
  }
  const std::size_t max_m = *std::max_element(cfg.ms.begin(), cfg.ms.end());
  std::vector<ProjectionPoint> points;
  for (AnchorSource src : cfg.sources) {
    for (BasisMode mode : cfg.bases) {
      for (std::size_t m : cfg.ms) {
        for (std::size_t k : cfg.ks) {
          ProjectionPoint pt;
          pt.basis = mode;
          pt.source = src;
          pt.k = k;
          pt.m = m;
          points.push_back(pt);
        }
      }
    }
  }

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    RandomStream rng(cfg.seed + t, 0);
    const SyntheticTask task(cfg.task.kind, cfg.task.params, rng);
    const ModelSpec model = cfg.task.make_model(rng);
    const Dataset priv = task.sample(cfg.task.n_private, rng);
    const Dataset pool = task.sample(max_m, rng);
    const Dataset random_pool = with_random_labels(pool, task.num_classes(), rng);
    const Dataset synthetic = gaussian_features(max_m, cfg.task.params.dim, task.num_classes(), rng);
    const DenseMatrix g = per_sample_gradients(model, priv);

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      ProjectionPoint& pt = points[pi];
      const Dataset& src = pt.source == AnchorSource::kHeldOutCorrectLabels ? pool
                           : pt.source == AnchorSource::kSynthetic       ? synthetic
                                                                          : random_pool;
      const DenseMatrix anchors =
          per_sample_gradients(model, src.subset(first_n(std::min(pt.m, src.size()))));
      const GroupLayout layout =
          cfg.task.group_by_layer ? make_group_layout(model, pt.k, pt.m)
                                  : make_even_layout(model.num_params(), pt.k, 1, pt.m);
      GepConfig gc;
      gc.k = pt.k;
      gc.m = pt.m;
      gc.power_iterations = cfg.power_iterations;
      gc.basis = pt.basis;
      RandomStream basis_rng(cfg.seed + t, 1 + pi);
      const AnchorBasis basis = build_anchor_basis(anchors, layout, gc, basis_rng);
      pt.errors.push_back(projection_error_rate(g, basis));
      if (cfg.stable_ranks) {
        pt.stable_rank_g.push_back(stable_rank(g));
        pt.stable_rank_r.push_back(stable_rank(basis.split(g).residual));
      }
    }
  }
  return points;
}

std::string format_projection_table(const std::vector<ProjectionPoint>& points) {
  std::ostringstream out;
  out << "basis\tsource\tk\tm\ttrials\tmean_error\tstd_error";
  const bool sr = !points.empty() && !points.front().stable_rank_g.empty();
  if (sr) out << "\tstable_rank_g\tstable_rank_r";
  out << "\n";
  out.precision(6);
  for (const ProjectionPoint& p : points) {
    out << to_string(p.basis) << "\t" << to_string(p.source) << "\t" << p.k << "\t" << p.m
        << "\t" << p.errors.size() << "\t" << p.mean() << "\t" << p.stddev();
    if (sr) out << "\t" << mean_of(p.stable_rank_g) << "\t" << mean_of(p.stable_rank_r);
    out << "\n";
  }
  return out.str();
}

PowerIterationCost measure_power_iteration_cost(std::size_t m, std::size_t k, std::size_t p,
                                                std::size_t groups, std::uint64_t seed) {
  if (m == 0 || k == 0 || p == 0 || groups == 0) {
    throw InvalidInput("measure_power_iteration_cost: sizes must be >= 1");
  }
  RandomStream rng(seed, 0);
  const DenseMatrix anchors = gaussian_noise(m, p, 1.0, rng);
  const GroupLayout layout = make_even_layout(p, k, groups);
  PowerIterationCost cost;
  cost.m = m;
  cost.k = k;
  cost.p = p;
  cost.groups = groups;
  const double g = static_cast<double>(groups);
  cost.model = 2.0 * m * k * p / g + p * static_cast<double>(k) * k / (g * g);
  for (const ParamGroup& grp : layout.groups) {
    const DenseMatrix slice = anchors.column_slice(grp.offset, grp.length);
    MacCounter counter;
    const BasisEstimate est = power_iteration_basis(slice, grp.k, 1, rng);
    cost.measured += counter.count();
  }
  return cost;
}

ConvexData convex_data(const ConvexExperimentConfig& cfg, std::uint64_t seed) {
  RandomStream rng(seed, 0x5eed);
  const SyntheticTask task(SynthKind::kGaussianMixture, cfg.data, rng);
  ConvexData d;
  d.train = task.sample(cfg.n_train, rng);
  d.aux = task.sample(cfg.train.gep.m, rng);
  d.eval = task.sample(cfg.n_eval, rng);
  return d;
}

std::vector<ConvexRun> convex_utility_experiment(const ConvexExperimentConfig& cfg) {
  if (cfg.data.classes != 2) throw InvalidInput("convex_utility_experiment: binary task only");
  std::vector<ConvexRun> runs;
  for (std::uint64_t seed : cfg.seeds) {
    const ConvexData data = convex_data(cfg, seed);
    for (double eps : cfg.epsilons) {
      for (Method method : cfg.methods) {
        TrainConfig tc = cfg.train;
        tc.model = ModelSpec::logistic(cfg.data.dim, 2);
        tc.method = method;
        tc.budget.epsilon = eps;
        tc.seed = seed;
        apply_calibration(tc);
        const TrainResult res = dp_train(tc, data.train, data.aux, data.eval);
        ConvexRun run;
        run.method = method;
        run.epsilon = eps;
        run.seed = seed;
        run.accuracy = res.metrics.back().eval_accuracy;
        double sq = 0.0;
        for (double v : res.model.params()) sq += v * v;
        run.objective = mean_loss(res.model, data.train) + 0.5 * tc.weight_decay * sq;
        std::vector<double> pe;
        for (const StepMetrics& s : res.metrics) {
          if (!std::isnan(s.projection_error_rate)) pe.push_back(s.projection_error_rate);
        }
        run.projection_error = mean_of(pe);
        runs.push_back(run);
      }
    }
  }
  return runs;
}

ConvexExperimentConfig convex_task_in_subspace() {
  ConvexExperimentConfig c;
  c.data.dim = 399;
  c.data.classes = 2;
  c.data.center_rank = 2;
  c.data.noise_rank = 2;
  c.data.cluster_sd = 0.5;
  c.data.separation = 2.0;
  c.data.tail_noise = 0.3;
  c.data.label_noise = 0.1;
  c.train.gep.k = 20;
  c.train.gep.m = 200;
  c.train.gep.clip_embedding = 0.5;
  c.train.gep.clip_residual = 0.05;
  c.train.gp_clip = 0.5;
  // Batches of about five: at full batch the noise is too small to matter.
  c.train.sample_rate = 0.0025;
  c.train.steps = 2000;
  c.train.lr = 0.03;
  c.train.momentum = 0.9;
  c.train.weight_decay = 0.01;
  c.methods = {Method::kGep, Method::kGp};
  return c;
}

ConvexExperimentConfig convex_task_outside_subspace() {
  ConvexExperimentConfig c;
  c.data.dim = 399;
  c.data.classes = 2;
  c.data.center_rank = 2;
  c.data.noise_rank = 2;
  c.data.cluster_sd = 0.5;
  c.data.separation = 2.0;
  c.data.nuisance_rank = 30;
  c.data.nuisance_sd = 3.0;
  c.data.tail_noise = 0.1;
  c.data.label_noise = 0.1;
  c.train.gep.k = 20;
  c.train.gep.m = 200;
  c.train.gep.clip_embedding = 20.0;
  c.train.gep.clip_residual = 3.0;
  c.train.gp_clip = 5.0;
  c.train.steps = 100;
  c.train.lr = 0.1;
  c.train.momentum = 0.9;
  c.train.weight_decay = 0.01;
  c.methods = {Method::kGep, Method::kBgep};
  c.epsilons = {8.0, 80.0};
  return c;
}

}  // namespace gep
