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

#include <filesystem>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "chlru/harness.h"

namespace chlru {
namespace {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& s, Parse parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = std::min(s.find(',', start), s.size());
    const std::string item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(parse(item));
    start = end + 1;
  }
  return out;
}

std::vector<uint64_t> u64_list(const std::string& s) {
  return parse_list<uint64_t>(s, [](const std::string& v) { return std::stoull(v); });
}

std::vector<double> double_list(const std::string& s) {
  return parse_list<double>(s, [](const std::string& v) { return std::stod(v); });
}

ptree read_ini(const std::string& path) {
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  return tree;
}

std::optional<std::string> get(const ptree& tree, const std::string& section,
                               const std::string& key) {
  const auto sec = tree.get_child_optional(section);
  if (!sec) return std::nullopt;
  for (const auto& [k, v] : *sec) {
    if (k == key) return trim(v.data());
  }
  return std::nullopt;
}

std::string resolve(const std::string& path, const std::string& config_path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(config_path).parent_path() / p).string();
}

// Applies the [cluster] and [workload] sections on top of `cfg`.
void apply_cluster(const ptree& tree, const std::string& config_path,
                   ClusterConfig& cfg) {
  if (auto v = get(tree, "cluster", "count")) {
    const auto n = std::stoull(*v);
    if (n != cfg.server_count()) {
      cfg.size_factors.assign(n, 1.0);
      cfg.dispatch = DispatchWeights::uniform(n);
    }
  }
  const std::size_t n = cfg.server_count();
  if (auto v = get(tree, "cluster", "base_size")) cfg.base_size = std::stoull(*v);
  if (auto v = get(tree, "cluster", "size_factors")) {
    if (*v == "uniform") {
      cfg.size_factors.assign(n, 1.0);
    } else {
      cfg.size_factors = double_list(*v);
    }
  }
  if (auto v = get(tree, "cluster", "z_fixture")) {
    const double spread = std::stod(get(tree, "cluster", "z_spread").value_or("0.1"));
    cfg.size_factors =
        size_factors_from_fixture(resolve(*v, config_path), n, spread);
  }
  const auto dispatch = get(tree, "cluster", "dispatch");
  if (dispatch && *dispatch == "ring") {
    RingDispatch ring;
    if (const auto* r = std::get_if<RingDispatch>(&cfg.dispatch)) ring = *r;
    if (auto v = get(tree, "cluster", "partitions")) ring.partition_count = std::stoull(*v);
    if (auto v = get(tree, "cluster", "prime")) ring.prime = std::stoull(*v);
    cfg.dispatch = ring;
  } else if (dispatch && *dispatch != "suha") {
    throw std::invalid_argument("config: dispatch must be suha or ring");
  } else {
    if (dispatch && !std::holds_alternative<DispatchWeights>(cfg.dispatch)) {
      cfg.dispatch = DispatchWeights::uniform(n);
    }
    if (auto v = get(tree, "cluster", "weights")) {
      if (*v == "experiment1") {
        cfg.dispatch = experiment1_weights();
      } else if (*v == "uniform") {
        cfg.dispatch = DispatchWeights::uniform(n);
      } else {
        cfg.dispatch = DispatchWeights(double_list(*v));
      }
    }
  }
  if (auto v = get(tree, "workload", "alpha")) cfg.alpha = std::stod(*v);
  if (auto v = get(tree, "workload", "catalog_size")) cfg.catalog_size = std::stoull(*v);
  if (auto v = get(tree, "workload", "warmup")) {
    if (*v == "default") {
      cfg.warmup_requests.reset();
    } else {
      cfg.warmup_requests = std::stoull(*v);
    }
  }
  if (auto v = get(tree, "workload", "measure")) cfg.measure_requests = std::stoull(*v);
  if (auto v = get(tree, "workload", "seed")) cfg.seed = std::stoull(*v);
}

}  // namespace

ClusterConfig load_cluster_config(const std::string& path) {
  const ptree tree = read_ini(path);
  ClusterConfig cfg;
  apply_cluster(tree, path, cfg);
  cfg.validate();
  return cfg;
}

ExperimentSpec load_experiment_config(const std::string& path, Scale scale) {
  const ptree tree = read_ini(path);
  ExperimentSpec spec;
  if (auto base = get(tree, "experiment", "base")) {
    spec = builtin_experiment(*base, scale);
  } else {
    spec.comparisons = default_comparisons();
  }
  if (auto v = get(tree, "experiment", "name")) spec.name = *v;
  apply_cluster(tree, path, spec.cluster);
  if (auto v = get(tree, "experiment", "sweep")) {
    spec.sweep.clear();
    for (uint64_t x : u64_list(*v)) spec.sweep.push_back(x);
  }
  if (auto v = get(tree, "experiment", "seeds")) spec.seeds = u64_list(*v);
  if (auto v = get(tree, "experiment", "servers")) {
    spec.servers.clear();
    for (uint64_t m : u64_list(*v)) {
      if (m == 0) throw std::invalid_argument("config: servers are 1-based");
      spec.servers.push_back(static_cast<ServerId>(m - 1));
    }
  }
  if (auto v = get(tree, "experiment", "predictors")) {
    spec.predictors = parse_list<Predictor>(*v, parse_predictor);
  }
  if (auto v = get(tree, "experiment", "virtual_scale")) {
    spec.virtual_scale = std::stod(*v);
  }
  if (auto v = get(tree, "experiment", "output")) spec.output = *v;
  if (auto v = get(tree, "fit", "lo")) spec.fit.lo = std::stod(*v);
  if (auto v = get(tree, "fit", "hi")) spec.fit.hi = std::stod(*v);
  if (auto v = get(tree, "fit", "seeds")) spec.fit.seeds = u64_list(*v);
  if (auto v = get(tree, "fit", "measure")) spec.fit.measure = std::stoull(*v);
  if (auto v = get(tree, "fit", "tolerance")) spec.fit.tolerance = std::stod(*v);

  if (const auto tol = tree.get_child_optional("tolerance")) {
    for (const auto& [series, value] : *tol) {
      bool found = false;
      for (auto& c : spec.comparisons) {
        if (c.series == series) {
          c.tolerance = std::stod(value.data());
          found = true;
        }
      }
      if (!found) {
        for (const auto& c : default_comparisons()) {
          if (c.series == series) {
            spec.comparisons.push_back(c);
            spec.comparisons.back().tolerance = std::stod(value.data());
            found = true;
          }
        }
      }
      if (!found) {
        throw std::invalid_argument("config: no comparison for series " + series);
      }
    }
  }
  if (const auto min_x = tree.get_child_optional("min_x")) {
    for (const auto& [series, value] : *min_x) {
      for (auto& c : spec.comparisons) {
        if (c.series == series) c.min_x = std::stod(value.data());
      }
    }
  }
  spec.validate();
  return spec;
}

}  // namespace chlru
