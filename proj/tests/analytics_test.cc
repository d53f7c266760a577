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

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "chlru/analytics.h"
#include "chlru/cluster_sim.h"
#include "chlru/harness.h"
#include "doctest.h"

using namespace chlru;

namespace {

bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::fabs(b);
}

// Independent evaluation of the cluster sum in extended precision.
long double cluster_sum_reference(long double alpha, long double c,
                                  const std::vector<double>& mu,
                                  const std::vector<double>& x) {
  const long double g = std::tgamma(1.0L - 1.0L / alpha);
  long double s = 0;
  for (std::size_t m = 0; m < mu.size(); ++m) {
    s += std::pow(static_cast<long double>(mu[m]) * g, alpha) * c /
         (alpha * std::pow(static_cast<long double>(x[m]), alpha - 1.0L));
  }
  return s;
}

// Newton iteration on 2 - e^{-2t/3} - e^{-t/3} = xbar, in long double.
long double two_item_ct_time(long double xbar) {
  long double t = 1.0L;
  for (int k = 0; k < 100; ++k) {
    const long double f = 2.0L - std::exp(-2.0L * t / 3.0L) - std::exp(-t / 3.0L) - xbar;
    const long double df =
        2.0L / 3.0L * std::exp(-2.0L * t / 3.0L) + std::exp(-t / 3.0L) / 3.0L;
    t -= f / df;
  }
  return t;
}

}  // namespace

TEST_CASE("gamma accuracy") {
  CHECK(std::fabs(std::tgamma(0.5) - std::sqrt(std::numbers::pi)) <= 1e-12);
  CHECK(std::fabs(std::tgamma(1.0) - 1.0) <= 1e-12);
  CHECK(std::fabs(zipf_gamma_constant(2.0) - std::sqrt(std::numbers::pi)) <= 1e-12);
  CHECK_THROWS_AS(zipf_gamma_constant(1.0), std::domain_error);
}

TEST_CASE("per-server prediction") {
  CHECK(predict_server_miss(2.0, 1.0, 1.0, 1.0, 10.0) ==
        doctest::Approx(std::numbers::pi / 20.0).epsilon(1e-13));
  CHECK(predict_server_miss(1.5, 0.5, 1e-12, 3.0, 100.0) < 1e-15);
  CHECK_THROWS_AS(predict_server_miss(1.0, 1.0, 1.0, 1.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(predict_server_miss(0.8, 1.0, 1.0, 1.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(predict_server_miss(1.5, 1.0, 0.0, 1.0, 10.0), std::domain_error);
  CHECK_THROWS_AS(predict_server_miss(1.5, 1.0, 1.0, INFINITY, 10.0),
                  std::domain_error);
}

TEST_CASE("cluster prediction special cases") {
  const double alpha = 1.55, c = 0.41, x = 120.0;
  const double single = c * std::pow(std::tgamma(1.0 - 1.0 / alpha), alpha) /
                        (alpha * std::pow(x, alpha - 1.0));
  const std::vector<double> one = {1.0}, xs = {x};
  CHECK(rel_close(predict_cluster_miss(alpha, c, one, xs), single, 1e-14));

  const std::vector<double> halves = {0.5, 0.5}, xx = {x, x};
  CHECK(rel_close(predict_cluster_miss(alpha, c, halves, xx),
                  std::pow(2.0, 1.0 - alpha) * single, 1e-14));
  CHECK_THROWS_AS(predict_cluster_miss(alpha, c, halves, xs), std::domain_error);
}

TEST_CASE("experiment-1 cluster prediction against an extended-precision sum") {
  const auto mu = experiment1_weights().values();
  const auto b = size_factors_from_fixture(default_fixture_path(), 100);
  std::vector<double> x(100);
  for (std::size_t m = 0; m < 100; ++m) x[m] = b[m] * 100.0;
  const double c = 0.4109;
  const double got = predict_cluster_miss(1.55, c, mu, x);
  const long double ref = cluster_sum_reference(1.55L, c, mu, x);
  CHECK(std::fabs(got - static_cast<double>(ref)) <= 1e-10 * static_cast<double>(ref));
}

TEST_CASE("per-server and cluster predictions agree through W") {
  const auto model = PopularityModel::zipf(1.55, 100'000);
  const auto mu = experiment1_weights();
  Rng rng(6);
  const auto a = assign_suha(model, mu, rng);
  const auto b = size_factors_from_fixture(default_fixture_path(), 100);
  std::vector<double> W(100);
  for (ServerId m = 0; m < 100; ++m) W[m] = a.W(m);
  for (double x : {40.0, 100.0, 200.0}) {
    const auto p = predict(1.55, model.normalizer(), mu.values(), W, x, b);
    long double recombined = 0;
    for (std::size_t m = 0; m < 100; ++m) recombined += p.per_server[m] / W[m];
    CHECK(rel_close(static_cast<double>(recombined), p.cluster, 1e-12));
    for (double v : p.per_server) CHECK((v > 0.0 && std::isfinite(v)));

    std::vector<double> xs(100), xs2(100);
    for (std::size_t m = 0; m < 100; ++m) {
      xs[m] = b[m] * x;
      xs2[m] = 2.0 * xs[m];
    }
    const double at_x = predict_cluster_miss(1.55, model.normalizer(), mu.values(), xs);
    const double at_2x = predict_cluster_miss(1.55, model.normalizer(), mu.values(), xs2);
    CHECK(rel_close(at_2x, std::pow(2.0, 1.0 - 1.55) * at_x, 1e-12));
  }
}

TEST_CASE("virtual cache size") {
  const std::vector<double> one = {1.0};
  CHECK(virtual_size(37.0, one, one, 1.7) == doctest::Approx(37.0).epsilon(1e-14));
  for (std::size_t n : {2, 10, 100}) {
    for (double alpha : {1.2, 1.55, 3.0}) {
      const std::vector<double> b(n, 1.0), mu(n, 1.0 / static_cast<double>(n));
      CHECK(rel_close(virtual_size(50.0, b, mu, alpha),
                      50.0 * static_cast<double>(n), 1e-12));
    }
  }
  CHECK_THROWS_AS(virtual_size(10.0, one, one, 1.0), std::domain_error);

  // Committed z draw; the reference value came from an independent NumPy
  // evaluation of the same sum.
  const auto b = size_factors_from_fixture(default_fixture_path(), 100);
  const double k = virtual_size(1.0, b, experiment1_weights().values(), 1.55);
  CHECK(rel_close(k, 90.84184467885395, 1e-9));
  CHECK(rel_close(k, 91.1784, 0.01));
}

TEST_CASE("characteristic time solves its defining equation") {
  const auto two = PopularityModel::from_probabilities({2.0 / 3.0, 1.0 / 3.0});
  const double t = ct_time(two, 1.0);
  CHECK(std::fabs(t - static_cast<double>(two_item_ct_time(1.0L))) <= 1e-9 * t);
  const double direct = 2.0 / 3.0 * std::exp(-2.0 * t / 3.0) + std::exp(-t / 3.0) / 3.0;
  CHECK(std::fabs(ct_miss(two, 1.0) - direct) <= 1e-12);

  CHECK(ct_time(two, 1e-9) < 1e-8);
  CHECK(ct_miss(two, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(ct_time(two, 2.0), std::domain_error);
  CHECK_THROWS_AS(ct_time(two, 0.0), std::domain_error);
  CHECK_THROWS_AS(ct_time(two, -1.0), std::domain_error);
}

TEST_CASE("characteristic time at experiment scale") {
  const auto model = PopularityModel::zipf(1.55, 10'000'000);
  const double xbar = 91.1784 * 100.0;
  const double t = ct_time(model, xbar);
  CHECK(std::fabs(ct_occupancy(model, t) - xbar) <= 1e-9 * xbar);
  const double miss = ct_miss_at(model, t);
  CHECK(miss > 0.0);
  CHECK(miss < 1.0);
}

TEST_CASE("characteristic time and miss are monotone") {
  const auto model = PopularityModel::zipf(1.2, 20'000);
  double prev_t = 0.0, prev_miss = 1.0;
  for (double xbar : {1.0, 10.0, 100.0, 1000.0, 5000.0, 19'000.0}) {
    const double t = ct_time(model, xbar);
    const double miss = ct_miss(model, xbar);
    CHECK(std::fabs(ct_occupancy(model, t) - xbar) <= 1e-9 * xbar);
    CHECK(t > prev_t);
    CHECK(miss < prev_miss);
    prev_t = t;
    prev_miss = miss;
  }
}

TEST_CASE("distinct-request function") {
  const auto model = PopularityModel::zipf(2.0, 100'000);
  CHECK(t_function(model, 0.0) == 0.0);
  CHECK(t_function(PopularityModel::zipf(1.5, 1), 3.0) == 1.0);
  const double x = 1e4;
  const double c = model.normalizer();
  const double ratio = t_function(model, x) /
                       (std::pow(c * x, 0.5) * std::tgamma(0.5));
  CHECK(ratio >= 0.95);
  CHECK(ratio <= 1.05);
  double prev = 0.0;
  for (double v : {0.5, 1.0, 10.0, 1e3, 1e6}) {
    const double cur = t_function(model, v);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK_THROWS_AS(t_function(model, -1.0), std::domain_error);
}

TEST_CASE("fit recovers a known scale on a synthetic curve") {
  const double true_k = 37.5;
  auto curve_fn = [](double cap) { return 2.0 / std::sqrt(cap); };
  std::vector<CurvePoint> curve;
  for (double x : {10.0, 20.0, 40.0, 80.0}) curve.push_back({x, curve_fn(true_k * x)});
  VirtualRunner runner = [&](std::size_t cap, uint64_t seed) {
    return curve_fn(static_cast<double>(cap)) * (1.0 + 1e-4 * static_cast<double>(seed % 3));
  };
  FitOptions options;
  options.lo = 5.0;
  options.hi = 100.0;
  const auto fit = fit_virtual_size(curve, runner, options);
  CHECK(fit.ok);
  CHECK(fit.scale == doctest::Approx(true_k).epsilon(0.01));
  CHECK(fit.discrepancy < 0.005);
  CHECK(fit.fitted.size() == curve.size());
}

TEST_CASE("fit refuses bad inputs") {
  VirtualRunner runner = [](std::size_t cap, uint64_t) {
    return 1.0 / static_cast<double>(cap);
  };
  FitOptions options;
  options.lo = 0.5;
  options.hi = 10.0;

  const std::vector<CurvePoint> rising = {{10, 0.1}, {20, 0.2}, {30, 0.05}};
  auto fit = fit_virtual_size(rising, runner, options);
  CHECK_FALSE(fit.ok);
  CHECK(fit.diagnostics.find("increases") != std::string::npos);

  const std::vector<CurvePoint> good = {{10, 0.05}, {20, 0.025}, {40, 0.0125}};
  VirtualRunner noisy = [](std::size_t cap, uint64_t seed) {
    return (seed % 2 ? 1.5 : 0.5) / static_cast<double>(cap);
  };
  fit = fit_virtual_size(good, noisy, options);
  CHECK_FALSE(fit.ok);
  CHECK(fit.diagnostics.find("spread") != std::string::npos);

  options.seeds = {1, 2};
  fit = fit_virtual_size(good, runner, options);
  CHECK_FALSE(fit.ok);

  options.seeds = {1, 2, 3};
  options.hi = 1.5;  // true k = 2 lies outside
  fit = fit_virtual_size(good, runner, options);
  CHECK_FALSE(fit.ok);
  CHECK(fit.diagnostics.find("boundary") != std::string::npos);
}

TEST_CASE("fit of a one-server cluster returns about 1") {
  ClusterConfig cfg;
  cfg.alpha = 0.8;
  cfg.catalog_size = 10'000;
  cfg.measure_requests = 1'000'000;
  cfg.seed = 12;
  const auto layout = build_layout(cfg);
  std::vector<CurvePoint> curve;
  for (std::size_t x : {200, 500, 1000}) {
    const std::size_t caps[] = {x};
    const auto stats = simulate_cluster(layout, caps, default_warmup(caps),
                                        cfg.measure_requests,
                                        derive_seed(cfg.seed, kRequestStream));
    curve.push_back({static_cast<double>(x), stats.cluster_miss_ratio()});
  }
  VirtualRunner runner = [&](std::size_t cap, uint64_t seed) {
    const std::size_t caps[] = {cap};
    return run_virtual(layout.model, layout.sampler, caps[0], 10 * cap + 10'000,
                       400'000, derive_seed(99, seed))
        .cluster_miss_ratio();
  };
  FitOptions options;
  options.lo = 0.5;
  options.hi = 2.0;
  options.resolution = 5e-3;
  const auto fit = fit_virtual_size(curve, runner, options);
  CHECK(fit.ok);
  CHECK(fit.scale == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.discrepancy < 0.01);
}

TEST_CASE("prediction csv") {
  const std::vector<PredictionRow> rows = {{100, "ct_approx", 0.0123456789012},
                                           {200, "virtual_size", 18168.36893}};
  std::ostringstream out;
  write_predictions_csv(out, rows);
  CHECK(out.str() == "x,predictor,value\n100,ct_approx,0.0123456789\n"
                     "200,virtual_size,18168.36893\n");
}
