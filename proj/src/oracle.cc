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

#include "chlru/oracle.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chlru {
namespace {

void validate(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("oracle: empty distribution");
  if (q.size() > kMaxExactCatalog) {
    throw std::length_error("oracle: catalog of " + std::to_string(q.size()) +
                            " items is too large to enumerate (max " +
                            std::to_string(kMaxExactCatalog) + ")");
  }
  long double total = 0;
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("oracle: probabilities must be non-negative");
    }
    total += v;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9) {
    throw std::invalid_argument("oracle: probabilities must sum to 1");
  }
}

// Depth-first walk over ordered tuples of distinct items. `used` marks the
// items already in the tuple, `prefix_mass` their total probability.
struct TupleWalk {
  std::span<const double> q;
  std::size_t length;
  long double mass = 0;  // sum of tuple probabilities
  long double miss = 0;  // sum of tuple probability times outside mass

  void walk(std::size_t depth, uint32_t used, long double prob,
            long double prefix_mass) {
    if (depth == length) {
      mass += prob;
      miss += prob * (1.0L - prefix_mass);
      return;
    }
    const long double rest = 1.0L - prefix_mass;
    if (rest <= 0) return;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (used & (1u << j)) continue;
      if (q[j] == 0.0) continue;
      walk(depth + 1, used | (1u << j), prob * q[j] / rest, prefix_mass + q[j]);
    }
  }
};

}  // namespace

double exact_mtf_miss(std::span<const double> q, std::size_t capacity) {
  validate(q);
  if (capacity < 1 || capacity >= q.size()) {
    throw std::invalid_argument("oracle: capacity must lie in 1..M-1");
  }
  TupleWalk w{q, capacity};
  w.walk(0, 0, 1.0L, 0.0L);
  return static_cast<double>(w.miss);
}

double ordered_tuple_mass(std::span<const double> q, std::size_t length) {
  validate(q);
  if (length > q.size()) {
    throw std::invalid_argument("oracle: tuple longer than catalog");
  }
  TupleWalk w{q, length};
  w.walk(0, 0, 1.0L, 0.0L);
  return static_cast<double>(w.mass);
}

ExactMissResult exact_mtf_distribution(std::span<const double> q) {
  validate(q);
  const std::size_t m = q.size();
  const uint32_t full = (1u << m) - 1;

  std::vector<long double> set_mass(full + 1, 0);
  for (uint32_t s = 1; s <= full; ++s) {
    const uint32_t low = s & (~s + 1);
    set_mass[s] = set_mass[s ^ low] + q[std::countr_zero(low)];
  }

  // top[S]: stationary probability that S is exactly the set of the |S|
  // most recently requested distinct items.
  std::vector<long double> top(full + 1, 0);
  top[0] = 1;
  for (uint32_t s = 1; s <= full; ++s) {
    long double p = 0;
    for (uint32_t rest = s; rest; rest &= rest - 1) {
      const int j = std::countr_zero(rest);
      const uint32_t before = s ^ (1u << j);
      const long double outside = 1.0L - set_mass[before];
      if (outside > 0) p += top[before] * q[j] / outside;
    }
    top[s] = p;
  }

  ExactMissResult out;
  out.occupancy.assign(m, std::vector<double>(m, 0.0));
  std::vector<long double> miss(m + 1, 0);
  std::vector<std::vector<long double>> occ(m, std::vector<long double>(m, 0));
  for (uint32_t s = 0; s <= full; ++s) {
    const auto k = static_cast<std::size_t>(std::popcount(s));
    const long double outside = 1.0L - set_mass[s];
    miss[k] += top[s] * outside;
    if (k == m || outside <= 0) continue;
    for (std::size_t i = 0; i < m; ++i) {
      if (s & (1u << i)) continue;
      occ[k][i] += top[s] * q[i] / outside;
    }
  }
  out.miss.resize(m + 1);
  for (std::size_t x = 0; x <= m; ++x) out.miss[x] = static_cast<double>(miss[x]);
  out.miss[0] = 1.0;
  out.miss[m] = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      out.occupancy[k][i] = static_cast<double>(occ[k][i]);
    }
  }
  return out;
}

}  // namespace chlru
