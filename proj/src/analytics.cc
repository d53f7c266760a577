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

#include "chlru/analytics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "chlru/format.h"
#include "chlru/numeric.h"

namespace chlru {
namespace {

void require_heavy_tail(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 1.0) {
    throw std::domain_error("predictor requires alpha > 1, got " +
                            std::to_string(alpha));
  }
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::domain_error(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double zipf_gamma_constant(double alpha) {
  require_heavy_tail(alpha);
  return std::tgamma(1.0 - 1.0 / alpha);
}

double predict_server_miss(double alpha, double c, double mu, double W,
                           double x) {
  const double g = zipf_gamma_constant(alpha);
  require_positive(c, "c");
  require_positive(mu, "mu");
  require_positive(W, "W");
  require_positive(x, "x");
  return std::pow(mu * g, alpha) * c * W / (alpha * std::pow(x, alpha - 1.0));
}

double predict_cluster_miss(double alpha, double c, std::span<const double> mu,
                            std::span<const double> x) {
  const double g = zipf_gamma_constant(alpha);
  require_positive(c, "c");
  if (mu.size() != x.size() || mu.empty()) {
    throw std::domain_error("cluster prediction: mu and x differ in length");
  }
  const double scale = std::pow(g, alpha) * c / alpha;
  CompensatedSum s;
  for (std::size_t m = 0; m < mu.size(); ++m) {
    require_positive(mu[m], "mu");
    require_positive(x[m], "x");
    s += std::pow(mu[m], alpha) / std::pow(x[m], alpha - 1.0);
  }
  return scale * s.value();
}

AsymptoticPrediction predict(double alpha, double c, std::span<const double> mu,
                             std::span<const double> W, double x,
                             std::span<const double> b) {
  if (mu.size() != W.size() || mu.size() != b.size()) {
    throw std::domain_error("prediction: mu, W and b differ in length");
  }
  AsymptoticPrediction out;
  out.alpha = alpha;
  out.c = c;
  out.x = x;
  out.mu.assign(mu.begin(), mu.end());
  out.W.assign(W.begin(), W.end());
  out.b.assign(b.begin(), b.end());
  std::vector<double> sizes(b.size());
  for (std::size_t m = 0; m < b.size(); ++m) {
    sizes[m] = b[m] * x;
    out.per_server.push_back(predict_server_miss(alpha, c, mu[m], W[m], sizes[m]));
  }
  out.cluster = predict_cluster_miss(alpha, c, mu, sizes);
  return out;
}

double virtual_size(double x, std::span<const double> b,
                    std::span<const double> mu, double alpha) {
  require_heavy_tail(alpha);
  require_positive(x, "x");
  if (b.size() != mu.size() || b.empty()) {
    throw std::domain_error("virtual size: b and mu differ in length");
  }
  CompensatedSum s;
  for (std::size_t m = 0; m < b.size(); ++m) {
    require_positive(b[m], "b");
    require_positive(mu[m], "mu");
    s += std::pow(mu[m], alpha) * std::pow(b[m], 1.0 - alpha);
  }
  return x * std::pow(s.value(), -1.0 / (alpha - 1.0));
}

double ct_occupancy(const PopularityModel& model, double t) {
  CompensatedSum s;
  const auto q = model.probabilities();
  for (std::size_t i = q.size(); i-- > 0;) s += -std::expm1(-q[i] * t);
  return s.value();
}

double ct_time(const PopularityModel& model, double xbar) {
  const auto m = static_cast<double>(model.size());
  if (!std::isfinite(xbar) || xbar <= 0.0) {
    throw std::domain_error("ct_time: xbar must be positive");
  }
  if (xbar >= m) {
    throw std::domain_error("ct_time: xbar must be below the catalog size");
  }
  const double tol = 1e-9 * xbar;
  double lo = 0.0;
  double hi = 1.0;
  double f_hi = ct_occupancy(model, hi);
  while (f_hi < xbar) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("ct_time: no bracket");
    f_hi = ct_occupancy(model, hi);
  }
  if (std::fabs(f_hi - xbar) <= tol) return hi;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f = ct_occupancy(model, mid);
    if (std::fabs(f - xbar) <= tol) return mid;
    if (mid <= lo || mid >= hi) return mid;  // bracket exhausted in doubles
    (f < xbar ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ct_miss_at(const PopularityModel& model, double t) {
  CompensatedSum s;
  const auto q = model.probabilities();
  for (std::size_t i = q.size(); i-- > 0;) s += q[i] * std::exp(-q[i] * t);
  return s.value();
}

double ct_miss(const PopularityModel& model, double xbar) {
  return ct_miss_at(model, ct_time(model, xbar));
}

double t_function(const PopularityModel& model, double x) {
  if (!(x >= 0.0)) throw std::domain_error("t_function: x must be >= 0");
  if (x == 0.0) return 0.0;
  CompensatedSum s;
  const auto q = model.probabilities();
  for (std::size_t i = q.size(); i-- > 0;) {
    s += -std::expm1(x * std::log1p(-q[i]));
  }
  return s.value();
}

FitResult fit_virtual_size(std::span<const CurvePoint> cluster_curve,
                           const VirtualRunner& runner,
                           const FitOptions& options) {
  FitResult result;
  std::ostringstream diag;
  if (cluster_curve.empty()) {
    result.diagnostics = "empty cluster curve";
    return result;
  }
  if (options.seeds.size() < 3) {
    result.diagnostics = "at least 3 seeds per probe are required";
    return result;
  }
  if (!(options.lo > 0.0) || !(options.hi > options.lo)) {
    result.diagnostics = "invalid search range";
    return result;
  }
  bool inputs_ok = true;
  for (std::size_t j = 0; j < cluster_curve.size(); ++j) {
    const auto& p = cluster_curve[j];
    if (!(p.miss > 0.0) || !std::isfinite(p.miss)) {
      diag << "cluster miss ratio at x=" << p.x << " is not positive; ";
      inputs_ok = false;
    }
    if (j > 0) {
      const auto& prev = cluster_curve[j - 1];
      if (!(p.x > prev.x)) {
        diag << "sweep not strictly increasing at x=" << p.x << "; ";
        inputs_ok = false;
      } else if (p.miss > prev.miss * (1.0 + options.tolerance)) {
        diag << "cluster curve increases from x=" << prev.x << " to x=" << p.x
             << "; ";
        inputs_ok = false;
      }
    }
  }
  if (!inputs_ok) {
    result.diagnostics = diag.str();
    return result;
  }

  struct Probe {
    double mean;
    double spread;  // relative standard deviation across seeds
  };
  std::map<std::size_t, Probe> cache;
  auto probe = [&](std::size_t capacity) -> const Probe& {
    auto it = cache.find(capacity);
    if (it != cache.end()) return it->second;
    CompensatedSum sum, sq;
    for (uint64_t seed : options.seeds) {
      const double v = runner(capacity, seed);
      sum += v;
      sq += v * v;
    }
    const auto n = static_cast<double>(options.seeds.size());
    const double mean = sum.value() / n;
    const double var = std::max(0.0, (sq.value() - n * mean * mean) / (n - 1.0));
    const double spread = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    return cache.emplace(capacity, Probe{mean, spread}).first->second;
  };
  auto capacity_at = [](double k, double x) {
    const double c = std::round(k * x);
    return c < 1.0 ? std::size_t{1} : static_cast<std::size_t>(c);
  };
  auto objective = [&](double k) {
    CompensatedSum s;
    for (const auto& p : cluster_curve) {
      s += std::fabs(probe(capacity_at(k, p.x)).mean - p.miss) / p.miss;
    }
    return s.value() / static_cast<double>(cluster_curve.size());
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double a = options.lo;
  double b = options.hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > options.resolution) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    }
  }
  result.scale = fc <= fd ? c : d;
  result.discrepancy = std::min(fc, fd);

  double worst_spread = 0.0;
  for (const auto& p : cluster_curve) {
    const Probe& pr = probe(capacity_at(result.scale, p.x));
    result.fitted.push_back(pr.mean);
    worst_spread = std::max(worst_spread, pr.spread);
  }

  result.ok = true;
  const double edge = 10.0 * options.resolution;
  // Capacities are integers, so the objective has flat steps; an end point
  // that does as well as the optimum also counts as a boundary hit.
  const bool edge_as_good = objective(options.lo) <= result.discrepancy ||
                            objective(options.hi) <= result.discrepancy;
  if (result.scale - options.lo < edge || options.hi - result.scale < edge ||
      edge_as_good) {
    diag << "optimum at search boundary k=" << result.scale << "; ";
    result.ok = false;
  }
  if (worst_spread > options.tolerance) {
    diag << "probe seed spread " << worst_spread << " exceeds tolerance; ";
    result.ok = false;
  }
  if (result.discrepancy > options.tolerance) {
    diag << "discrepancy " << result.discrepancy << " exceeds tolerance "
         << options.tolerance << "; ";
    result.ok = false;
  }
  result.diagnostics = diag.str();
  return result;
}

void write_predictions_csv(std::ostream& out,
                           std::span<const PredictionRow> rows) {
  out << "x,predictor,value\n";
  for (const auto& r : rows) {
    out << format_value(r.x) << ',' << r.predictor << ','
        << format_value(r.value) << '\n';
  }
}

}  // namespace chlru
