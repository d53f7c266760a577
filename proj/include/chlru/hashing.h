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
#include <iosfwd>
#include <limits>
#include <vector>

#include "chlru/popularity.h"
#include "chlru/random.h"

namespace chlru {

// Servers are 0-based; server s is S_{s+1} in reports.
using ServerId = uint32_t;

// Probabilities mu_m that an item lands on server m under uniform hashing.
class DispatchWeights {
 public:
  // Throws std::invalid_argument unless every entry is positive and the
  // entries sum to one within 1e-12.
  explicit DispatchWeights(std::vector<double> mu);

  static DispatchWeights uniform(std::size_t server_count);

  std::size_t size() const { return mu_.size(); }
  double operator[](std::size_t m) const { return mu_[m]; }
  const std::vector<double>& values() const { return mu_; }

 private:
  std::vector<double> mu_;
};

// Consistent-hash ring over `partition_count` partitions using the
// 2-independent family h(k) = ((a*k + b) mod p) mod P. Server s hashes the
// key s+1 and item i hashes the key i+1, so both use 1-based labels.
class HashRing {
 public:
  // Throws std::invalid_argument if p is not prime, p <= P, P < N, N == 0,
  // or a, b exceed p.
  HashRing(std::size_t server_count, uint64_t partition_count, uint64_t prime,
           uint64_t coeff_a, uint64_t coeff_b);

  // A ring with explicitly placed servers; items still hash with (a, b).
  static HashRing with_positions(uint64_t partition_count, uint64_t prime,
                                 uint64_t coeff_a, uint64_t coeff_b,
                                 std::vector<uint64_t> positions);

  std::size_t server_count() const { return positions_.size(); }
  uint64_t partition_count() const { return partitions_; }
  uint64_t prime() const { return prime_; }
  uint64_t coeff_a() const { return a_; }
  uint64_t coeff_b() const { return b_; }

  uint64_t hash(uint64_t key) const {
    const unsigned __int128 v = static_cast<unsigned __int128>(a_) * key + b_;
    return static_cast<uint64_t>(v % prime_) % partitions_;
  }

  uint64_t position(ServerId s) const { return positions_[s]; }
  bool active(ServerId s) const { return active_[s]; }
  std::size_t active_count() const;

  // The same ring with one server taken out. Remaining servers keep their
  // positions and ids.
  HashRing without(ServerId s) const;

  // Owning server of each partition: the active server at the smallest
  // position >= k, wrapping to the smallest position overall. Ties on a
  // position go to the lowest server id.
  std::vector<ServerId> partition_owners() const;

 private:
  uint64_t partitions_, prime_, a_, b_;
  std::vector<uint64_t> positions_;
  std::vector<bool> active_;
};

bool is_prime(uint64_t n);

// Draws a and b uniformly from 1..p and places the servers.
HashRing build_ring(std::size_t server_count, uint64_t partition_count,
                    uint64_t prime, Rng& rng);

// Realized item -> server map together with the mass each server receives.
class HashAssignment {
 public:
  HashAssignment(const PopularityModel& model, std::vector<ServerId> owners,
                 std::size_t server_count);

  std::size_t server_count() const { return mass_.size(); }
  std::size_t item_count() const { return owner_.size(); }
  ServerId owner(ItemId item) const { return owner_[item]; }
  const std::vector<ServerId>& owners() const { return owner_; }

  // P[J_0 = m | H].
  double per_server_mass(ServerId m) const { return mass_[m]; }
  const std::vector<double>& per_server_masses() const { return mass_; }
  // W_m = 1 / per_server_mass; +inf for a server that owns nothing.
  double W(ServerId m) const {
    return mass_[m] > 0.0 ? 1.0 / mass_[m]
                          : std::numeric_limits<double>::infinity();
  }

  // Items owned by m, ascending.
  std::vector<ItemId> items_of(ServerId m) const;
  std::vector<std::size_t> item_counts() const;

 private:
  std::vector<ServerId> owner_;
  std::vector<double> mass_;
};

// Each item independently lands on server m with probability mu_m.
HashAssignment assign_suha(const PopularityModel& model,
                           const DispatchWeights& weights, Rng& rng);

// Each item goes to the ring successor of its partition.
HashAssignment assign_ring(const PopularityModel& model, const HashRing& ring);

// q_i^(m) = W_m q_{m_i}: the popularity seen by server m, in ascending
// original item order. Empty if m owns nothing.
std::vector<double> conditional_popularity(const HashAssignment& assignment,
                                           const PopularityModel& model,
                                           ServerId m);

// CSV exports with 1-based ids: (item_index, owner) and (server_index,
// position).
void write_assignment_csv(std::ostream& out, const HashAssignment& assignment);
void write_ring_csv(std::ostream& out, const HashRing& ring);

}  // namespace chlru
