// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chlru/popularity.h"

namespace chlru {

// Closed-form miss-ratio predictors for an LRU cluster behind a random hash,
// valid asymptotically in the cache sizes for Zipf exponents alpha > 1.
// All functions are pure; domain violations throw std::domain_error.

// Gamma(1 - 1/alpha), the constant that drives every power-law predictor.
double zipf_gamma_constant(double alpha);

// Conditional miss ratio of server m:
//   (mu_m Gamma(1-1/alpha))^alpha c W_m / (alpha x_m^(alpha-1)).
double predict_server_miss(double alpha, double c, double mu, double W,
                           double x);

// Cluster miss ratio: sum_m mu_m^alpha Gamma(1-1/alpha)^alpha c /
// (alpha x_m^(alpha-1)). Does not depend on the realized hash.
double predict_cluster_miss(double alpha, double c, std::span<const double> mu,
                            std::span<const double> x);

struct AsymptoticPrediction {
  std::vector<double> per_server;
  double cluster = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double x = 0.0;
  std::vector<double> mu;
  std::vector<double> W;
  std::vector<double> b;
};

// Per-server and cluster predictions at base size x with x_m = b_m x.
AsymptoticPrediction predict(double alpha, double c, std::span<const double> mu,
                             std::span<const double> W, double x,
                             std::span<const double> b);

// Size of the single LRU cache whose miss ratio matches the cluster's:
//   x (sum_m mu_m^alpha b_m^(1-alpha))^(-1/(alpha-1)).
double virtual_size(double x, std::span<const double> b,
                    std::span<const double> mu, double alpha);

// Expected number of distinct items held after time t under the
// characteristic-time model: sum_i (1 - exp(-q_i t)).
double ct_occupancy(const PopularityModel& model, double t);

// The unique t_C with ct_occupancy(t_C) = xbar, to a residual of
// 1e-9 * xbar. Requires 0 < xbar < M.
double ct_time(const PopularityModel& model, double xbar);

// sum_i q_i exp(-q_i t_C).
double ct_miss(const PopularityModel& model, double xbar);
double ct_miss_at(const PopularityModel& model, double t);

// Expected number of distinct items among x i.i.d. requests:
// sum_i (1 - (1 - q_i)^x).
double t_function(const PopularityModel& model, double x);

struct CurvePoint {
  double x;
  double miss;
};

// Returns the miss ratio of a single LRU cache of the given capacity run
// under the given seed.
using VirtualRunner = std::function<double(std::size_t capacity, uint64_t seed)>;

struct FitOptions {
  double lo = 1.0;
  double hi = 200.0;
  std::vector<uint64_t> seeds{1, 2, 3};
  // Accepted mean relative discrepancy and per-probe seed spread.
  double tolerance = 0.05;
  // Golden-section stops once the bracket is narrower than this.
  double resolution = 1e-3;
};

struct FitResult {
  bool ok = false;
  double scale = 0.0;
  // Mean over the curve of |virtual(k x) - cluster(x)| / cluster(x).
  double discrepancy = 0.0;
  // Seed-averaged virtual miss ratio at round(scale * x) for each point.
  std::vector<double> fitted;
  std::string diagnostics;
};

// Finds k such that a single LRU of capacity round(k x) best reproduces the
// cluster curve, by golden-section search over [lo, hi]. Each capacity probe
// averages the runner over all seeds. The result is marked !ok, with
// diagnostics, when the input curve is not monotone, the probes are too
// noisy, the optimum sits on the search boundary, or the best discrepancy
// exceeds the tolerance.
FitResult fit_virtual_size(std::span<const CurvePoint> cluster_curve,
                           const VirtualRunner& runner,
                           const FitOptions& options);

struct PredictionRow {
  double x;
  std::string predictor;
  double value;
};

// Rows (x, predictor_name, value).
void write_predictions_csv(std::ostream& out, std::span<const PredictionRow> rows);

}  // namespace chlru
