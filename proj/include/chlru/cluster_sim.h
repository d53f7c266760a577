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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "chlru/hashing.h"
#include "chlru/popularity.h"

namespace chlru {

struct RingDispatch {
  uint64_t partition_count = 2000;
  uint64_t prime = 15881;
};

struct ClusterConfig {
  std::size_t base_size = 1;
  // b_m; server m gets capacity round(b_m * base_size).
  std::vector<double> size_factors{1.0};
  std::variant<DispatchWeights, RingDispatch> dispatch =
      DispatchWeights::uniform(1);
  double alpha = 1.0;
  std::size_t catalog_size = 1;
  // Defaults to max(10 * sum of capacities, 10^6) when unset.
  std::optional<uint64_t> warmup_requests;
  uint64_t measure_requests = 1;
  uint64_t seed = 0;

  std::size_t server_count() const { return size_factors.size(); }
  std::vector<std::size_t> capacities() const;
  uint64_t warmup() const;
  // Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

// round(b_m * x), at least 1.
std::vector<std::size_t> scaled_capacities(std::span<const double> factors,
                                           std::size_t base_size);
uint64_t default_warmup(std::span<const std::size_t> capacities);

// Request and miss counters gathered during the measurement phase only.
struct MissStats {
  std::vector<uint64_t> requests;
  std::vector<uint64_t> misses;

  std::size_t server_count() const { return requests.size(); }
  uint64_t total_requests() const;
  uint64_t total_misses() const;

  // Undefined (nullopt) for a server that received no requests.
  std::optional<double> server_miss_ratio(std::size_t m) const;
  std::optional<double> server_stderr(std::size_t m) const;
  double cluster_miss_ratio() const;
  double cluster_stderr() const;
};

// Binomial standard error sqrt(p(1-p)/n).
double binomial_stderr(double p, uint64_t n);

// Everything fixed by the seed before any request is issued: the catalog,
// its sampler, and the realized hash assignment H.
struct ClusterLayout {
  PopularityModel model;
  AliasSampler sampler;
  HashAssignment assignment;
  std::optional<HashRing> ring;
  // Dense per-server index of every item, so each cache can size its lookup
  // table to the items it can ever see.
  std::vector<uint32_t> local_index;
};

ClusterLayout make_layout(PopularityModel model, HashAssignment assignment,
                          std::optional<HashRing> ring = std::nullopt);

// Builds the model and assignment from the config's assignment stream.
ClusterLayout build_layout(const ClusterConfig& config);

// Drives `warmup + measure` IRM requests through the owners' LRU caches.
// Only the measurement phase is counted.
MissStats simulate_cluster(const ClusterLayout& layout,
                           std::span<const std::size_t> capacities,
                           uint64_t warmup, uint64_t measure,
                           uint64_t request_seed);

// Full pipeline: layout then workload, both derived from config.seed.
MissStats run(const ClusterConfig& config);

// A single LRU cache serving the whole request stream.
MissStats run_virtual(const PopularityModel& model, const AliasSampler& sampler,
                      std::size_t capacity, uint64_t warmup, uint64_t measure,
                      uint64_t seed);
MissStats run_virtual(const PopularityModel& model, std::size_t capacity,
                      uint64_t warmup, uint64_t measure, uint64_t seed);

// Stream ids used with derive_seed().
inline constexpr uint64_t kAssignmentStream = 0;
inline constexpr uint64_t kRequestStream = 1;

// Rows (x, server, requests, misses, miss_ratio, stderr); server is the
// 1-based id or "cluster". Undefined ratios are written as nan.
void write_miss_stats_csv(std::ostream& out, double x, const MissStats& stats,
                          bool header = true);

}  // namespace chlru
