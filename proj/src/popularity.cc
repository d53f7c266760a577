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

#include "chlru/popularity.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chlru/numeric.h"

namespace chlru {

PopularityModel PopularityModel::zipf(double alpha, std::size_t catalog_size) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw std::invalid_argument("zipf: alpha must be finite and positive, got " +
                                std::to_string(alpha));
  }
  if (catalog_size == 0) {
    throw std::invalid_argument("zipf: catalog size must be at least 1");
  }
  if (catalog_size > UINT32_MAX) {
    throw std::invalid_argument("zipf: catalog size exceeds 32-bit item ids");
  }
  std::vector<double> q(catalog_size);
  // Accumulate from the tail so the compensated sum starts with the
  // smallest terms.
  CompensatedSum total;
  for (std::size_t i = catalog_size; i-- > 0;) {
    q[i] = std::pow(static_cast<double>(i + 1), -alpha);
    total += q[i];
  }
  const double c = 1.0 / total.value();
  for (double& v : q) v *= c;
  return PopularityModel(alpha, c, std::move(q));
}

PopularityModel PopularityModel::from_probabilities(
    std::vector<double> probabilities) {
  if (probabilities.empty()) {
    throw std::invalid_argument("popularity: empty distribution");
  }
  if (probabilities.size() > UINT32_MAX) {
    throw std::invalid_argument("popularity: catalog exceeds 32-bit item ids");
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("popularity: probabilities must be finite "
                                  "and non-negative");
    }
    if (i > 0 && p > probabilities[i - 1]) {
      throw std::invalid_argument("popularity: probabilities must be "
                                  "non-increasing");
    }
    total += p;
  }
  if (std::fabs(total.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("popularity: probabilities must sum to 1");
  }
  const double scale = 1.0 / total.value();
  for (double& p : probabilities) p *= scale;
  return PopularityModel(std::nullopt, 1.0, std::move(probabilities));
}

double PopularityModel::tail_mass(std::size_t start) const {
  if (start < 1 || start > size() + 1) {
    throw std::out_of_range("tail_mass: start " + std::to_string(start) +
                            " outside 1.." + std::to_string(size() + 1));
  }
  if (start == 1) return 1.0;
  CompensatedSum s;
  for (std::size_t i = size(); i-- > start - 1;) s += probabilities_[i];
  return s.value();
}

AliasSampler::AliasSampler(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0 || n > UINT32_MAX) {
    throw std::invalid_argument("alias: weight count must be in 1..2^32-1");
  }
  const double total = compensated_sum(weights);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("alias: weights must have positive finite sum");
  }

  std::vector<double> scaled(n);
  std::vector<uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) {
      throw std::invalid_argument("alias: negative weight");
    }
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
  }

  table_.resize(n);
  auto threshold_of = [](double p) -> uint64_t {
    if (p >= 1.0) return UINT64_MAX;
    return static_cast<uint64_t>(std::ldexp(p, 64));
  };
  while (!small.empty() && !large.empty()) {
    const uint32_t s = small.back();
    small.pop_back();
    const uint32_t l = large.back();
    table_[s] = {threshold_of(scaled[s]), l};
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are within rounding of 1.
  for (uint32_t i : large) table_[i] = {UINT64_MAX, i};
  for (uint32_t i : small) table_[i] = {UINT64_MAX, i};
}

}  // namespace chlru
