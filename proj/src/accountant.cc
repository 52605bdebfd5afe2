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

#include "gep/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gep/errors.h"

namespace gep {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> terms) {
  double hi = -kInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == -kInf || hi == kInf) return hi;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - hi);
  return hi + std::log(s);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

bool is_integer(double x) { return std::floor(x) == x; }

}  // namespace

void RdpCurve::validate() const {
  if (orders.size() != costs.size()) {
    throw InvalidInput("RdpCurve: orders and costs differ in length");
  }
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (!(orders[i] > 1.0)) throw InvalidInput("RdpCurve: orders must be > 1");
    if (i > 0 && !(orders[i] > orders[i - 1])) {
      throw InvalidInput("RdpCurve: orders must be strictly ascending");
    }
    if (std::isnan(costs[i]) || costs[i] < 0.0) {
      throw InvalidInput("RdpCurve: costs must be non-negative");
    }
  }
}

RdpCurve RdpCurve::scaled(double factor) const {
  RdpCurve out = *this;
  for (double& c : out.costs) c *= factor;
  return out;
}

void DpBudget::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInput("DpBudget: epsilon must be finite and > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("DpBudget: delta must be in (0, 1)");
  }
}

double rdp_gaussian(double order, double sensitivity, double sigma) {
  if (!(order > 1.0)) throw InvalidInput("rdp_gaussian: order must be > 1");
  if (!(sensitivity >= 0.0)) {
    throw InvalidInput("rdp_gaussian: sensitivity must be >= 0");
  }
  if (!(sigma >= 0.0)) throw InvalidInput("rdp_gaussian: sigma must be >= 0");
  if (sensitivity == 0.0) return 0.0;
  if (sigma == 0.0) return kInf;
  return order * sensitivity * sensitivity / (2.0 * sigma * sigma);
}

RdpCurve rdp_compose(std::span<const RdpCurve> curves) {
  if (curves.empty()) throw InvalidInput("rdp_compose: no curves");
  RdpCurve out = curves.front();
  out.validate();
  for (const RdpCurve& c : curves.subspan(1)) {
    if (c.orders != out.orders) {
      throw InvalidInput("rdp_compose: curves use different order grids");
    }
    for (std::size_t i = 0; i < c.costs.size(); ++i) out.costs[i] += c.costs[i];
  }
  return out;
}

DpConversion rdp_to_dp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("rdp_to_dp: delta must be in (0, 1)");
  }
  curve.validate();
  if (curve.orders.empty()) throw InvalidInput("rdp_to_dp: empty curve");
  const double log_inv_delta = std::log(1.0 / delta);
  DpConversion best{kInf, curve.orders.front()};
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double eps =
        curve.costs[i] + log_inv_delta / (curve.orders[i] - 1.0);
    if (eps < best.epsilon) best = {eps, curve.orders[i]};
  }
  return best;
}

double rdp_subsampled_gaussian(double order, double q, double sigma) {
  if (!(order >= 2.0) || !is_integer(order)) {
    std::ostringstream msg;
    msg << "rdp_subsampled_gaussian: order " << order
        << " is not an integer >= 2";
    throw UnsupportedOrder(msg.str());
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidInput("rdp_subsampled_gaussian: q must be in [0, 1]");
  }
  if (!(sigma > 0.0)) throw InvalidInput("rdp_subsampled_gaussian: sigma must be > 0");
  if (q == 0.0) return 0.0;

  const int alpha = static_cast<int>(order);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  std::vector<double> terms;
  terms.reserve(alpha + 1);
  for (int j = 0; j <= alpha; ++j) {
    if (q == 1.0 && j < alpha) continue;  // (1-q)^(alpha-j) vanishes
    double t = log_binomial(alpha, j) + j * (j - 1) / (2.0 * sigma * sigma);
    if (j > 0) t += j * log_q;
    if (alpha - j > 0) t += (alpha - j) * log_1mq;
    terms.push_back(t);
  }
  return std::max(0.0, log_sum_exp(terms) / (alpha - 1));
}

std::vector<double> default_orders() {
  std::vector<double> orders;
  for (int a = 2; a <= 256; ++a) orders.push_back(a);
  return orders;
}

std::vector<double> orders_with_analytic(const DpBudget& budget) {
  budget.validate();
  std::vector<double> orders = default_orders();
  const double analytic = 1.0 + 2.0 * std::log(1.0 / budget.delta) / budget.epsilon;
  if (std::find(orders.begin(), orders.end(), analytic) == orders.end()) {
    orders.insert(std::lower_bound(orders.begin(), orders.end(), analytic),
                  analytic);
  }
  return orders;
}

RdpCurve gaussian_step_curve(std::span<const double> orders, double q,
                             double sigma) {
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.costs.reserve(orders.size());
  for (double a : orders) {
    if (sigma == 0.0 && q > 0.0) {
      curve.costs.push_back(kInf);
      continue;
    }
    curve.costs.push_back(q == 1.0 ? rdp_gaussian(a, 1.0, sigma)
                                   : rdp_subsampled_gaussian(a, q, sigma));
  }
  curve.validate();
  return curve;
}

DpConversion epsilon_after(std::span<const double> orders, double q,
                           double sigma, std::int64_t steps, double delta) {
  if (steps < 0) throw InvalidInput("epsilon_after: negative step count");
  if (steps == 0) return {0.0, orders.empty() ? 0.0 : orders.back()};
  return rdp_to_dp(gaussian_step_curve(orders, q, sigma).scaled(
                       static_cast<double>(steps)),
                   delta);
}

double calibrate_sigma_closed_form(const DpBudget& budget, std::int64_t steps) {
  budget.validate();
  if (steps < 1) throw InvalidInput("calibrate_sigma_closed_form: T must be >= 1");
  const double log_inv_delta = std::log(1.0 / budget.delta);
  if (budget.epsilon > 2.0 * log_inv_delta) {
    std::ostringstream msg;
    msg << "closed-form calibration requires epsilon <= 2 log(1/delta) = "
        << 2.0 * log_inv_delta << " (got " << budget.epsilon
        << "); use the search calibration instead";
    throw OutOfRegime(msg.str());
  }
  return 2.0 * std::sqrt(2.0 * static_cast<double>(steps) * log_inv_delta) /
         budget.epsilon;
}

double calibrate_sigma_search(const DpBudget& budget, double q,
                              std::int64_t steps,
                              std::span<const double> orders,
                              const SearchBracket& bracket) {
  budget.validate();
  if (!(q > 0.0 && q <= 1.0)) {
    throw InvalidInput("calibrate_sigma_search: q must be in (0, 1]");
  }
  if (steps < 1) throw InvalidInput("calibrate_sigma_search: T must be >= 1");
  if (orders.empty()) throw InvalidInput("calibrate_sigma_search: empty order grid");

  auto feasible = [&](double sigma) {
    return epsilon_after(orders, q, sigma, steps, budget.delta).epsilon <=
           budget.epsilon;
  };
  double lo = bracket.lower;
  double hi = bracket.upper;
  if (!feasible(hi)) {
    std::ostringstream msg;
    msg << "no sigma <= " << hi << " reaches epsilon=" << budget.epsilon
        << " at delta=" << budget.delta << " for T=" << steps << ", q=" << q
        << " (epsilon at sigma=" << hi << " is "
        << epsilon_after(orders, q, hi, steps, budget.delta).epsilon << ")";
    throw CalibrationFailure(msg.str());
  }
  if (feasible(lo)) return lo;
  // Invariant: lo infeasible, hi feasible. Bisect in log space.
  while (hi / lo - 1.0 > bracket.relative_tolerance) {
    const double mid = std::sqrt(lo * hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace gep
