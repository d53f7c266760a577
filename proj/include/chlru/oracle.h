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
#include <span>
#include <vector>

namespace chlru {

// Exact stationary behaviour of a move-to-front list under the independent
// reference model, for catalogs small enough to enumerate.

inline constexpr std::size_t kMaxExactCatalog = 12;

// Stationary P[C_0 > capacity]: the probability that the requested item is
// not among the `capacity` most recently requested distinct items. Sums, over
// every ordered tuple (j_1..j_x) of distinct items, the tuple's stationary
// probability prod_k q_{j_k} / (1 - sum_{l<k} q_{j_l}) times the mass outside
// the tuple.
//
// Requires |q| <= 12 (std::length_error otherwise), q summing to one and
// 1 <= capacity < |q| (std::invalid_argument).
double exact_mtf_miss(std::span<const double> q, std::size_t capacity);

// Total stationary probability of all ordered `length`-tuples; one up to
// rounding.
double ordered_tuple_mass(std::span<const double> q, std::size_t length);

struct ExactMissResult {
  // occupancy[k][i]: probability that item i sits at MTF position k+1.
  std::vector<std::vector<double>> occupancy;
  // miss[x] = P[C_0 > x] for x = 0..M; miss[0] = 1 and miss[M] = 0.
  std::vector<double> miss;
};

// Same quantities for every capacity at once, by dynamic programming over
// unordered top sets instead of ordered tuples.
ExactMissResult exact_mtf_distribution(std::span<const double> q);

}  // namespace chlru
