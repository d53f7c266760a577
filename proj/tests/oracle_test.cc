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

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "chlru/cluster_sim.h"
#include "chlru/oracle.h"
#include "chlru/random.h"
#include "doctest.h"

using namespace chlru;

namespace {

std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> q(n);
  double total = 0.0;
  for (double& v : q) total += (v = 0.02 + rng.uniform());
  for (double& v : q) v /= total;
  std::sort(q.begin(), q.end(), std::greater<>());
  return q;
}

}  // namespace

TEST_CASE("capacity one reduces to 1 - sum q^2") {
  Rng rng(3);
  for (std::size_t n = 2; n <= 9; ++n) {
    const auto q = random_distribution(rng, n);
    double sq = 0.0;
    for (double v : q) sq += v * v;
    CHECK(exact_mtf_miss(q, 1) == doctest::Approx(1.0 - sq).epsilon(1e-13));
  }
  const std::vector<double> two = {2.0 / 3.0, 1.0 / 3.0};
  CHECK(std::fabs(exact_mtf_miss(two, 1) - 4.0 / 9.0) <= 1e-15);
}

TEST_CASE("uniform catalog with one slot short misses 1/M") {
  for (std::size_t n = 2; n <= 8; ++n) {
    const std::vector<double> q(n, 1.0 / static_cast<double>(n));
    CHECK(std::fabs(exact_mtf_miss(q, n - 1) - 1.0 / static_cast<double>(n)) <= 1e-13);
  }
}

TEST_CASE("argument checks") {
  const std::vector<double> big(13, 1.0 / 13.0);
  CHECK_THROWS_AS(exact_mtf_miss(big, 3), std::length_error);
  CHECK_THROWS_AS(exact_mtf_distribution(big), std::length_error);
  const std::vector<double> q = {0.5, 0.3, 0.2};
  CHECK_THROWS_AS(exact_mtf_miss(q, 0), std::invalid_argument);
  CHECK_THROWS_AS(exact_mtf_miss(q, 3), std::invalid_argument);
  const std::vector<double> unnormalized = {0.5, 0.3};
  CHECK_THROWS_AS(exact_mtf_miss(unnormalized, 1), std::invalid_argument);
}

TEST_CASE("ordered tuples carry unit mass") {
  Rng rng(8);
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto q = random_distribution(rng, n);
    for (std::size_t len = 0; len <= n; ++len) {
      CHECK(std::fabs(ordered_tuple_mass(q, len) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("tuple enumeration and set recursion agree") {
  Rng rng(21);
  for (std::size_t n = 2; n <= 9; ++n) {
    const auto q = random_distribution(rng, n);
    const auto dist = exact_mtf_distribution(q);
    REQUIRE(dist.miss.size() == n + 1);
    CHECK(dist.miss[0] == 1.0);
    CHECK(dist.miss[n] == 0.0);
    for (std::size_t x = 1; x < n; ++x) {
      CHECK(std::fabs(dist.miss[x] - exact_mtf_miss(q, x)) <= 1e-12);
      CHECK(dist.miss[x] <= dist.miss[x - 1]);
    }
    for (std::size_t k = 0; k < n; ++k) {
      double row = 0.0, col = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        row += dist.occupancy[k][i];
        col += dist.occupancy[i][k];
        CHECK(dist.occupancy[k][i] >= 0.0);
      }
      CHECK(std::fabs(row - 1.0) <= 1e-12);
      CHECK(std::fabs(col - 1.0) <= 1e-12);
    }
    // P[C_0 > x] = sum_i q_i P[i below position x].
    for (std::size_t x = 1; x < n; ++x) {
      double via_occupancy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double top = 0.0;
        for (std::size_t k = 0; k < x; ++k) top += dist.occupancy[k][i];
        via_occupancy += q[i] * (1.0 - top);
      }
      CHECK(std::fabs(via_occupancy - dist.miss[x]) <= 1e-12);
    }
  }
}

TEST_CASE("largest enumerable catalog") {
  const auto model = PopularityModel::zipf(0.9, 12);
  const std::vector<double> q(model.probabilities().begin(), model.probabilities().end());
  const auto dist = exact_mtf_distribution(q);
  CHECK(std::fabs(exact_mtf_miss(q, 4) - dist.miss[4]) <= 1e-12);
}

TEST_CASE("simulation converges to the exact value") {
  Rng rng(5);
  for (std::size_t n : {3, 5, 7}) {
    const auto q = random_distribution(rng, n);
    const auto model = PopularityModel::from_probabilities(q);
    for (std::size_t x = 1; x < n; ++x) {
      const double exact = exact_mtf_miss(q, x);
      const auto stats = run_virtual(model, x, 1000, 1'000'000, 40 + n * 10 + x);
      CAPTURE(n);
      CAPTURE(x);
      CHECK(std::fabs(stats.cluster_miss_ratio() - exact) <=
            4.0 * binomial_stderr(exact, stats.total_requests()));
    }
  }
}
