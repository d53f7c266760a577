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

#include "chlru/hashing.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "chlru/numeric.h"

namespace chlru {

DispatchWeights::DispatchWeights(std::vector<double> mu) : mu_(std::move(mu)) {
  if (mu_.empty()) throw std::invalid_argument("weights: no servers");
  for (double v : mu_) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw std::invalid_argument("weights: every mu_m must be positive");
    }
  }
  const double total = compensated_sum(mu_);
  if (std::fabs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("weights: mu must sum to 1, got " +
                                std::to_string(total));
  }
}

DispatchWeights DispatchWeights::uniform(std::size_t server_count) {
  if (server_count == 0) throw std::invalid_argument("weights: no servers");
  return DispatchWeights(
      std::vector<double>(server_count, 1.0 / static_cast<double>(server_count)));
}

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (uint64_t d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

HashRing::HashRing(std::size_t server_count, uint64_t partition_count,
                   uint64_t prime, uint64_t coeff_a, uint64_t coeff_b)
    : partitions_(partition_count), prime_(prime), a_(coeff_a), b_(coeff_b) {
  if (server_count == 0) throw std::invalid_argument("ring: no servers");
  if (partition_count < server_count) {
    throw std::invalid_argument("ring: fewer partitions than servers");
  }
  if (!is_prime(prime)) {
    throw std::invalid_argument("ring: " + std::to_string(prime) +
                                " is not prime");
  }
  if (prime <= partition_count) {
    throw std::invalid_argument("ring: prime must exceed partition count");
  }
  if (coeff_a > prime || coeff_b > prime) {
    throw std::invalid_argument("ring: coefficients must not exceed p");
  }
  positions_.resize(server_count);
  for (std::size_t s = 0; s < server_count; ++s) positions_[s] = hash(s + 1);
  active_.assign(server_count, true);
}

HashRing HashRing::with_positions(uint64_t partition_count, uint64_t prime,
                                  uint64_t coeff_a, uint64_t coeff_b,
                                  std::vector<uint64_t> positions) {
  HashRing ring(positions.size(), partition_count, prime, coeff_a, coeff_b);
  for (uint64_t pos : positions) {
    if (pos >= partition_count) {
      throw std::invalid_argument("ring: position outside partition range");
    }
  }
  ring.positions_ = std::move(positions);
  return ring;
}

std::size_t HashRing::active_count() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

HashRing HashRing::without(ServerId s) const {
  if (s >= server_count()) throw std::out_of_range("ring: no such server");
  HashRing copy = *this;
  copy.active_[s] = false;
  if (copy.active_count() == 0) {
    throw std::invalid_argument("ring: cannot remove the last server");
  }
  return copy;
}

std::vector<ServerId> HashRing::partition_owners() const {
  constexpr ServerId kNone = UINT32_MAX;
  // Lowest active id at each occupied position.
  std::vector<ServerId> at(partitions_, kNone);
  for (std::size_t s = positions_.size(); s-- > 0;) {
    if (active_[s]) at[positions_[s]] = static_cast<ServerId>(s);
  }
  ServerId first = kNone;
  for (ServerId v : at) {
    if (v != kNone) {
      first = v;
      break;
    }
  }
  if (first == kNone) throw std::logic_error("ring: no active server");

  std::vector<ServerId> owners(partitions_);
  ServerId next = first;  // wrap-around successor
  for (uint64_t k = partitions_; k-- > 0;) {
    if (at[k] != kNone) next = at[k];
    owners[k] = next;
  }
  return owners;
}

HashRing build_ring(std::size_t server_count, uint64_t partition_count,
                    uint64_t prime, Rng& rng) {
  const uint64_t a = 1 + rng.below(prime);
  const uint64_t b = 1 + rng.below(prime);
  return HashRing(server_count, partition_count, prime, a, b);
}

HashAssignment::HashAssignment(const PopularityModel& model,
                               std::vector<ServerId> owners,
                               std::size_t server_count)
    : owner_(std::move(owners)) {
  if (owner_.size() != model.size()) {
    throw std::invalid_argument("assignment: owner map does not cover catalog");
  }
  if (server_count == 0) throw std::invalid_argument("assignment: no servers");
  std::vector<CompensatedSum> sums(server_count);
  for (std::size_t i = owner_.size(); i-- > 0;) {
    if (owner_[i] >= server_count) {
      throw std::invalid_argument("assignment: owner id out of range");
    }
    sums[owner_[i]] += model.probability(static_cast<ItemId>(i));
  }
  mass_.resize(server_count);
  for (std::size_t m = 0; m < server_count; ++m) mass_[m] = sums[m].value();
}

std::vector<ItemId> HashAssignment::items_of(ServerId m) const {
  std::vector<ItemId> items;
  for (std::size_t i = 0; i < owner_.size(); ++i) {
    if (owner_[i] == m) items.push_back(static_cast<ItemId>(i));
  }
  return items;
}

std::vector<std::size_t> HashAssignment::item_counts() const {
  std::vector<std::size_t> counts(server_count(), 0);
  for (ServerId s : owner_) ++counts[s];
  return counts;
}

HashAssignment assign_suha(const PopularityModel& model,
                           const DispatchWeights& weights, Rng& rng) {
  std::vector<ServerId> owners(model.size());
  if (weights.size() > 1) {
    const AliasSampler pick(weights.values());
    for (auto& o : owners) o = pick.sample(rng);
  }
  return HashAssignment(model, std::move(owners), weights.size());
}

HashAssignment assign_ring(const PopularityModel& model, const HashRing& ring) {
  const std::vector<ServerId> by_partition = ring.partition_owners();
  std::vector<ServerId> owners(model.size());
  for (std::size_t i = 0; i < owners.size(); ++i) {
    owners[i] = by_partition[ring.hash(i + 1)];
  }
  return HashAssignment(model, std::move(owners), ring.server_count());
}

std::vector<double> conditional_popularity(const HashAssignment& assignment,
                                           const PopularityModel& model,
                                           ServerId m) {
  if (m >= assignment.server_count()) {
    throw std::out_of_range("conditional_popularity: no such server");
  }
  std::vector<double> q;
  const double mass = assignment.per_server_mass(m);
  if (mass <= 0.0) return q;
  for (std::size_t i = 0; i < assignment.item_count(); ++i) {
    if (assignment.owner(static_cast<ItemId>(i)) == m) {
      q.push_back(model.probability(static_cast<ItemId>(i)) / mass);
    }
  }
  return q;
}

void write_assignment_csv(std::ostream& out, const HashAssignment& assignment) {
  out << "item_index,owner\n";
  for (std::size_t i = 0; i < assignment.item_count(); ++i) {
    out << i + 1 << ',' << assignment.owner(static_cast<ItemId>(i)) + 1 << '\n';
  }
}

void write_ring_csv(std::ostream& out, const HashRing& ring) {
  out << "server_index,position\n";
  for (std::size_t s = 0; s < ring.server_count(); ++s) {
    if (!ring.active(static_cast<ServerId>(s))) continue;
    out << s + 1 << ',' << ring.position(static_cast<ServerId>(s)) << '\n';
  }
}

}  // namespace chlru
