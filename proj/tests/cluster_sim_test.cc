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
#include <sstream>
#include <stdexcept>
#include <vector>

#include "chlru/cluster_sim.h"
#include "doctest.h"

using namespace chlru;

namespace {

double one_minus_sum_sq(const PopularityModel& m) {
  long double s = 0;
  for (double q : m.probabilities()) s += static_cast<long double>(q) * q;
  return static_cast<double>(1.0L - s);
}

ClusterConfig small_config() {
  ClusterConfig cfg;
  cfg.size_factors = {1.0, 1.5, 0.5, 1.0};
  cfg.dispatch = DispatchWeights({0.4, 0.3, 0.2, 0.1});
  cfg.base_size = 10;
  cfg.alpha = 1.2;
  cfg.catalog_size = 5000;
  cfg.warmup_requests = 50'000;
  cfg.measure_requests = 300'000;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("capacities round and floor at one") {
  const std::vector<double> b = {1.0, 0.95, 1.049, 0.001};
  CHECK(scaled_capacities(b, 100) == std::vector<std::size_t>{100, 95, 105, 1});
  const std::vector<std::size_t> caps = {10, 20};
  CHECK(default_warmup(caps) == 1'000'000);
  const std::vector<std::size_t> big = {100'000, 50'000};
  CHECK(default_warmup(big) == 1'500'000);
}

TEST_CASE("config validation") {
  auto cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.measure_requests = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.size_factors = {1.0, 1.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.base_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.dispatch = RingDispatch{3, 5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("single cache holding the whole catalog never misses") {
  ClusterConfig cfg;
  cfg.alpha = 0.9;
  cfg.catalog_size = 50;
  cfg.base_size = 50;
  cfg.warmup_requests = 100'000;
  cfg.measure_requests = 100'000;
  const auto stats = run(cfg);
  CHECK(stats.total_misses() == 0);
  CHECK(stats.cluster_miss_ratio() == 0.0);

  const auto model = PopularityModel::zipf(0.9, 50);
  CHECK(run_virtual(model, 80, 100'000, 100'000, 3).total_misses() == 0);
}

TEST_CASE("capacity-one miss ratio equals 1 - sum q^2") {
  ClusterConfig cfg;
  cfg.alpha = 1.3;
  cfg.catalog_size = 1000;
  cfg.base_size = 1;
  cfg.measure_requests = 1'000'000;
  cfg.seed = 4;
  const auto stats = run(cfg);
  const auto model = PopularityModel::zipf(1.3, 1000);
  const double expected = one_minus_sum_sq(model);
  CHECK(std::fabs(stats.cluster_miss_ratio() - expected) <=
        3.0 * binomial_stderr(expected, stats.total_requests()));

  const auto v = run_virtual(model, 1, 1000, 1'000'000, 9);
  CHECK(std::fabs(v.cluster_miss_ratio() - expected) <=
        3.0 * binomial_stderr(expected, v.total_requests()));
}

TEST_CASE("accounting identity and bounds") {
  const auto stats = run(small_config());
  REQUIRE(stats.server_count() == 4);
  CHECK(stats.total_requests() == 300'000);
  double weighted = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(stats.misses[m] <= stats.requests[m]);
    const double share = static_cast<double>(stats.requests[m]) / 300'000.0;
    weighted += stats.server_miss_ratio(m).value() * share;
  }
  CHECK(std::fabs(weighted - stats.cluster_miss_ratio()) <= 1e-15);
}

TEST_CASE("runs are deterministic under a seed") {
  const auto a = run(small_config());
  const auto b = run(small_config());
  CHECK(a.requests == b.requests);
  CHECK(a.misses == b.misses);
  auto other = small_config();
  other.seed = 18;
  CHECK(run(other).misses != a.misses);
}

TEST_CASE("request shares track 1/W_m") {
  ClusterConfig cfg;
  cfg.size_factors.assign(10, 1.0);
  cfg.dispatch = DispatchWeights::uniform(10);
  cfg.base_size = 20;
  cfg.alpha = 1.1;
  cfg.catalog_size = 10'000;
  cfg.warmup_requests = 0;
  cfg.measure_requests = 10'000'000;
  cfg.seed = 23;
  const auto layout = build_layout(cfg);
  const auto caps = cfg.capacities();
  const auto stats = simulate_cluster(layout, caps, 0, cfg.measure_requests,
                                      derive_seed(cfg.seed, kRequestStream));
  const double total = static_cast<double>(stats.total_requests());
  for (ServerId m = 0; m < 10; ++m) {
    const double p = layout.assignment.per_server_mass(m);
    CAPTURE(m);
    CHECK(std::fabs(static_cast<double>(stats.requests[m]) / total - p) <=
          3.0 * std::sqrt(p * (1.0 - p) / total));
  }
}

TEST_CASE("larger caches never miss more on the same stream") {
  auto cfg = small_config();
  const auto layout = build_layout(cfg);
  const uint64_t seed = derive_seed(cfg.seed, kRequestStream);
  for (std::size_t x : {1, 3, 10, 40}) {
    cfg.base_size = x;
    const auto small = simulate_cluster(layout, cfg.capacities(), 20'000, 200'000, seed);
    cfg.base_size = 2 * x;
    const auto large = simulate_cluster(layout, cfg.capacities(), 20'000, 200'000, seed);
    for (std::size_t m = 0; m < 4; ++m) {
      CHECK(large.requests[m] == small.requests[m]);
      CHECK(large.misses[m] <= small.misses[m]);
    }
  }
}

TEST_CASE("empty server reports an undefined ratio") {
  auto model = PopularityModel::zipf(1.0, 20);
  HashAssignment a(model, std::vector<ServerId>(20, 0), 2);
  const auto layout = make_layout(std::move(model), std::move(a));
  const std::vector<std::size_t> caps = {5, 5};
  const auto stats = simulate_cluster(layout, caps, 100, 1000, 1);
  CHECK(stats.requests[1] == 0);
  CHECK_FALSE(stats.server_miss_ratio(1).has_value());
  CHECK(stats.server_miss_ratio(0).has_value());

  std::ostringstream out;
  write_miss_stats_csv(out, 5, stats);
  const std::string csv = out.str();
  CHECK(csv.rfind("x,server,requests,misses,miss_ratio,stderr\n", 0) == 0);
  CHECK(csv.find("\n5,2,0,0,nan,nan\n") != std::string::npos);
  CHECK(csv.find("\n5,cluster,1000,") != std::string::npos);
}

TEST_CASE("ring dispatch builds a reproducible layout") {
  ClusterConfig cfg;
  cfg.size_factors.assign(100, 1.0);
  cfg.dispatch = RingDispatch{2000, 15881};
  cfg.alpha = 0.8;
  cfg.catalog_size = 10'000;
  cfg.seed = 5;
  const auto a = build_layout(cfg);
  const auto b = build_layout(cfg);
  REQUIRE(a.ring.has_value());
  CHECK(a.ring->coeff_a() == b.ring->coeff_a());
  CHECK(a.assignment.owners() == b.assignment.owners());
}
