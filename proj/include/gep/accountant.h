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

// Rényi-DP accounting for Gaussian releases: per-mechanism costs,
// composition, conversion to (epsilon, delta)-DP, amplification by Poisson
// subsampling and noise-multiplier calibration.

#ifndef GEP_ACCOUNTANT_H_
#define GEP_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <vector>

namespace gep {

// Accumulated RDP cost gamma(order) in nats on an ascending order grid.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> costs;

  // Throws InvalidInput unless orders are strictly ascending and > 1 and
  // costs are finite (or +inf) and non-negative.
  void validate() const;
  RdpCurve scaled(double factor) const;

  friend bool operator==(const RdpCurve&, const RdpCurve&) = default;
};

struct DpBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  void validate() const;
};

struct DpConversion {
  double epsilon = 0.0;
  double order = 0.0;  // minimizing order
};

// order * S² / (2 sigma²). Returns +inf when sigma == 0 and S > 0.
double rdp_gaussian(double order, double sensitivity, double sigma);

// Pointwise sum. Throws InvalidInput when grids differ or the list is empty.
RdpCurve rdp_compose(std::span<const RdpCurve> curves);

// min over the grid of gamma(order) + log(1/delta) / (order - 1).
DpConversion rdp_to_dp(const RdpCurve& curve, double delta);

// Upper bound on the RDP of the Poisson-subsampled Gaussian mechanism with
// unit sensitivity at an integer order alpha:
//   1/(alpha-1) * log sum_j C(alpha,j) (1-q)^(alpha-j) q^j exp(j(j-1)/(2 sigma²))
// evaluated in log space. Throws UnsupportedOrder for non-integer orders.
double rdp_subsampled_gaussian(double order, double q, double sigma);

// Integer orders 2..256.
std::vector<double> default_orders();
// default_orders() plus the analytic order 1 + 2 log(1/delta) / epsilon,
// kept ascending. Only usable with q == 1.
std::vector<double> orders_with_analytic(const DpBudget& budget);

// Per-invocation curve of a unit-sensitivity Gaussian release with noise
// multiplier sigma under Poisson sampling rate q. For q == 1 any order is
// allowed; otherwise all orders must be integers.
RdpCurve gaussian_step_curve(std::span<const double> orders, double q,
                             double sigma);

// epsilon after `steps` invocations of gaussian_step_curve.
DpConversion epsilon_after(std::span<const double> orders, double q,
                           double sigma, std::int64_t steps, double delta);

// 2 sqrt(2 T log(1/delta)) / epsilon. This is the multiplier sigma with
// sigma_1 = sigma S_1 and sigma_2 = sigma S_2 for two Gaussian releases per
// step over T steps. Throws OutOfRegime when epsilon > 2 log(1/delta).
double calibrate_sigma_closed_form(const DpBudget& budget, std::int64_t steps);

struct SearchBracket {
  double lower = 1e-2;
  double upper = 1e4;
  double relative_tolerance = 1e-4;
};

// Smallest unit-sensitivity multiplier sigma (to relative tolerance) such
// that epsilon_after(orders, q, sigma, steps, delta) <= budget.epsilon.
// Returns bracket.lower when it already satisfies the budget; throws
// CalibrationFailure when bracket.upper does not.
double calibrate_sigma_search(const DpBudget& budget, double q,
                              std::int64_t steps,
                              std::span<const double> orders,
                              const SearchBracket& bracket = {});

}  // namespace gep

#endif  // GEP_ACCOUNTANT_H_
