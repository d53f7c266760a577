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

#include "chlru/cluster_sim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "chlru/format.h"
#include "chlru/lru_cache.h"
#include "chlru/random.h"

namespace chlru {

std::vector<std::size_t> scaled_capacities(std::span<const double> factors,
                                           std::size_t base_size) {
  std::vector<std::size_t> caps(factors.size());
  for (std::size_t m = 0; m < factors.size(); ++m) {
    const double v = std::round(factors[m] * static_cast<double>(base_size));
    caps[m] = v < 1.0 ? 1 : static_cast<std::size_t>(v);
  }
  return caps;
}

uint64_t default_warmup(std::span<const std::size_t> capacities) {
  const uint64_t total =
      std::accumulate(capacities.begin(), capacities.end(), uint64_t{0});
  return std::max<uint64_t>(10 * total, 1'000'000);
}

std::vector<std::size_t> ClusterConfig::capacities() const {
  return scaled_capacities(size_factors, base_size);
}

uint64_t ClusterConfig::warmup() const {
  if (warmup_requests) return *warmup_requests;
  return default_warmup(capacities());
}

void ClusterConfig::validate() const {
  if (size_factors.empty()) throw std::invalid_argument("cluster: N must be >= 1");
  if (base_size == 0) throw std::invalid_argument("cluster: base size must be >= 1");
  for (double b : size_factors) {
    if (!std::isfinite(b) || b <= 0.0) {
      throw std::invalid_argument("cluster: size factors must be positive");
    }
  }
  if (measure_requests == 0) {
    throw std::invalid_argument("cluster: measure_requests must be >= 1");
  }
  if (const auto* w = std::get_if<DispatchWeights>(&dispatch)) {
    if (w->size() != size_factors.size()) {
      throw std::invalid_argument("cluster: weight count differs from N");
    }
  } else {
    const auto& r = std::get<RingDispatch>(dispatch);
    if (!is_prime(r.prime) || r.prime <= r.partition_count ||
        r.partition_count < size_factors.size()) {
      throw std::invalid_argument("cluster: invalid ring parameters");
    }
  }
  if (!std::isfinite(alpha) || alpha <= 0.0 || catalog_size == 0) {
    throw std::invalid_argument("cluster: invalid popularity parameters");
  }
}

uint64_t MissStats::total_requests() const {
  return std::accumulate(requests.begin(), requests.end(), uint64_t{0});
}

uint64_t MissStats::total_misses() const {
  return std::accumulate(misses.begin(), misses.end(), uint64_t{0});
}

double binomial_stderr(double p, uint64_t n) {
  if (n == 0) return std::nan("");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::optional<double> MissStats::server_miss_ratio(std::size_t m) const {
  if (requests[m] == 0) return std::nullopt;
  return static_cast<double>(misses[m]) / static_cast<double>(requests[m]);
}

std::optional<double> MissStats::server_stderr(std::size_t m) const {
  const auto p = server_miss_ratio(m);
  if (!p) return std::nullopt;
  return binomial_stderr(*p, requests[m]);
}

double MissStats::cluster_miss_ratio() const {
  const uint64_t r = total_requests();
  if (r == 0) return std::nan("");
  return static_cast<double>(total_misses()) / static_cast<double>(r);
}

double MissStats::cluster_stderr() const {
  return binomial_stderr(cluster_miss_ratio(), total_requests());
}

ClusterLayout make_layout(PopularityModel model, HashAssignment assignment,
                          std::optional<HashRing> ring) {
  if (assignment.item_count() != model.size()) {
    throw std::invalid_argument("layout: assignment does not match catalog");
  }
  AliasSampler sampler(model.probabilities());
  std::vector<uint32_t> local(model.size());
  std::vector<uint32_t> next(assignment.server_count(), 0);
  for (std::size_t i = 0; i < local.size(); ++i) {
    local[i] = next[assignment.owner(static_cast<ItemId>(i))]++;
  }
  return ClusterLayout{std::move(model), std::move(sampler),
                       std::move(assignment), std::move(ring), std::move(local)};
}

ClusterLayout build_layout(const ClusterConfig& config) {
  config.validate();
  auto model = PopularityModel::zipf(config.alpha, config.catalog_size);
  Rng rng(derive_seed(config.seed, kAssignmentStream));
  if (const auto* w = std::get_if<DispatchWeights>(&config.dispatch)) {
    auto assignment = assign_suha(model, *w, rng);
    return make_layout(std::move(model), std::move(assignment));
  }
  const auto& r = std::get<RingDispatch>(config.dispatch);
  HashRing ring =
      build_ring(config.server_count(), r.partition_count, r.prime, rng);
  auto assignment = assign_ring(model, ring);
  return make_layout(std::move(model), std::move(assignment), std::move(ring));
}

MissStats simulate_cluster(const ClusterLayout& layout,
                           std::span<const std::size_t> capacities,
                           uint64_t warmup, uint64_t measure,
                           uint64_t request_seed) {
  const std::size_t n = layout.assignment.server_count();
  if (capacities.size() != n) {
    throw std::invalid_argument("simulate: capacity count differs from N");
  }
  const std::vector<std::size_t> counts = layout.assignment.item_counts();
  std::vector<LruCache> caches;
  caches.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    if (capacities[m] == 0) throw std::invalid_argument("simulate: zero capacity");
    // Capacity beyond the items a server owns never evicts.
    caches.emplace_back(std::min(capacities[m], std::max<std::size_t>(counts[m], 1)),
                        counts[m]);
  }

  const ServerId* owner = layout.assignment.owners().data();
  const uint32_t* local = layout.local_index.data();
  const AliasSampler& sampler = layout.sampler;
  Rng rng(request_seed);

  for (uint64_t k = 0; k < warmup; ++k) {
    const ItemId item = sample_item(sampler, rng);
    caches[owner[item]].access(local[item]);
  }

  MissStats stats{std::vector<uint64_t>(n, 0), std::vector<uint64_t>(n, 0)};
  uint64_t* req = stats.requests.data();
  uint64_t* miss = stats.misses.data();
  for (uint64_t k = 0; k < measure; ++k) {
    const ItemId item = sample_item(sampler, rng);
    const ServerId s = owner[item];
    ++req[s];
    miss[s] += caches[s].access(local[item]) == AccessResult::kMiss;
  }
  return stats;
}

MissStats run(const ClusterConfig& config) {
  const ClusterLayout layout = build_layout(config);
  const auto caps = config.capacities();
  return simulate_cluster(layout, caps, config.warmup(),
                          config.measure_requests,
                          derive_seed(config.seed, kRequestStream));
}

MissStats run_virtual(const PopularityModel& model, const AliasSampler& sampler,
                      std::size_t capacity, uint64_t warmup, uint64_t measure,
                      uint64_t seed) {
  if (capacity == 0) throw std::invalid_argument("virtual: capacity must be >= 1");
  LruCache cache(std::min(capacity, model.size()), model.size());
  Rng rng(derive_seed(seed, kRequestStream));
  for (uint64_t k = 0; k < warmup; ++k) cache.access(sample_item(sampler, rng));
  uint64_t misses = 0;
  for (uint64_t k = 0; k < measure; ++k) {
    misses += cache.access(sample_item(sampler, rng)) == AccessResult::kMiss;
  }
  return MissStats{{measure}, {misses}};
}

MissStats run_virtual(const PopularityModel& model, std::size_t capacity,
                      uint64_t warmup, uint64_t measure, uint64_t seed) {
  const AliasSampler sampler(model.probabilities());
  return run_virtual(model, sampler, capacity, warmup, measure, seed);
}

void write_miss_stats_csv(std::ostream& out, double x, const MissStats& stats,
                          bool header) {
  if (header) out << "x,server,requests,misses,miss_ratio,stderr\n";
  const std::string xs = format_value(x);
  for (std::size_t m = 0; m < stats.server_count(); ++m) {
    const auto p = stats.server_miss_ratio(m);
    const auto se = stats.server_stderr(m);
    out << xs << ',' << m + 1 << ',' << stats.requests[m] << ','
        << stats.misses[m] << ',' << (p ? format_value(*p) : "nan") << ','
        << (se ? format_value(*se) : "nan") << '\n';
  }
  out << xs << ",cluster," << stats.total_requests() << ','
      << stats.total_misses() << ',' << format_value(stats.cluster_miss_ratio())
      << ',' << format_value(stats.cluster_stderr()) << '\n';
}

}  // namespace chlru
