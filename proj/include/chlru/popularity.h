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
#include <optional>
#include <span>
#include <vector>

#include "chlru/random.h"

namespace chlru {

// Items are identified by 0-based indices ordered by non-increasing
// popularity; item k corresponds to rank k+1 of the Zipf law.
using ItemId = uint32_t;

// Popularity distribution of a finite catalog under the independent
// reference model. Immutable once built.
class PopularityModel {
 public:
  // Truncated Zipf law q_i = c / i^alpha, i = 1..catalog_size.
  // Throws std::invalid_argument on a non-finite or non-positive alpha or an
  // empty catalog.
  static PopularityModel zipf(double alpha, std::size_t catalog_size);

  // Arbitrary distribution. Entries must be non-negative, non-increasing and
  // sum to one within 1e-9; they are renormalized with compensated summation.
  static PopularityModel from_probabilities(std::vector<double> probabilities);

  std::size_t size() const { return probabilities_.size(); }
  std::optional<double> alpha() const { return alpha_; }
  // c = 1 / sum(i^-alpha) for Zipf models; 1 otherwise.
  double normalizer() const { return normalizer_; }

  std::span<const double> probabilities() const { return probabilities_; }
  double probability(ItemId item) const { return probabilities_[item]; }

  // Sum of q_i over 1-based ranks start..M. Valid for 1 <= start <= M+1;
  // throws std::out_of_range otherwise.
  double tail_mass(std::size_t start) const;

 private:
  PopularityModel(std::optional<double> alpha, double normalizer,
                  std::vector<double> probabilities)
      : alpha_(alpha),
        normalizer_(normalizer),
        probabilities_(std::move(probabilities)) {}

  std::optional<double> alpha_;
  double normalizer_;
  std::vector<double> probabilities_;
};

// Walker/Vose alias table: O(n) preprocessing, one 64-bit random word and
// one table lookup per draw.
class AliasSampler {
 public:
  explicit AliasSampler(std::span<const double> weights);

  std::size_t size() const { return table_.size(); }

  uint32_t sample(Rng& rng) const {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(rng.next()) * table_.size();
    const auto slot = static_cast<std::size_t>(m >> 64);
    const auto coin = static_cast<uint64_t>(m);
    const Entry& e = table_[slot];
    return coin < e.threshold ? static_cast<uint32_t>(slot) : e.alias;
  }

 private:
  struct Entry {
    // Probability of keeping the slot, scaled to 2^64.
    uint64_t threshold;
    uint32_t alias;
  };
  std::vector<Entry> table_;
};

// Draws a request from the model. The sampler must have been built from
// model.probabilities().
inline ItemId sample_item(const AliasSampler& sampler, Rng& rng) {
  return sampler.sample(rng);
}

}  // namespace chlru
