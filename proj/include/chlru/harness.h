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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chlru/cluster_sim.h"

namespace chlru {

// Series that an experiment can evaluate next to the empirical cluster run.
enum class Predictor {
  kTheorem1,            // per-server asymptotic, realized W_m
  kClusterAsymptotic,   // cluster asymptotic
  kVirtualEquivalence,  // single LRU of the pooled size, simulated
  kCtApprox,            // characteristic-time estimate at the pooled size
  kOracle,              // exact enumeration, tiny per-server catalogs only
  kFittedVirtual,       // single LRU at an empirically fitted size
};

std::string predictor_name(Predictor p);
Predictor parse_predictor(const std::string& name);

enum class Scale { kDesk, kPaper };
Scale parse_scale(const std::string& name);

struct FitSettings {
  double lo = 20.0;
  double hi = 200.0;
  std::vector<uint64_t> seeds{1, 2, 3};
  uint64_t measure = 2'000'000;
  double tolerance = 0.05;
};

struct Comparison {
  std::string series;
  std::string reference;
  double tolerance;
  double min_x = 0.0;
  // Gate on the mean instead of the maximum relative error.
  bool gate_on_mean = false;
};

// Predictor series paired with the empirical series they estimate.
std::vector<Comparison> default_comparisons();

struct ExperimentSpec {
  std::string name;
  // Template; base_size and seed are overwritten per sweep point.
  ClusterConfig cluster;
  std::vector<std::size_t> sweep;
  std::vector<Predictor> predictors;
  std::vector<uint64_t> seeds{1};
  // 0-based servers that get per-server rows.
  std::vector<ServerId> servers;
  // Pooled size per unit x; computed from the dispatch weights when unset.
  std::optional<double> virtual_scale;
  FitSettings fit;
  std::vector<Comparison> comparisons = default_comparisons();
  std::string output;

  bool wants(Predictor p) const;
  // Throws std::invalid_argument on a malformed spec. Predictor parameter
  // domains are checked separately; see predictor_domain_error().
  void validate() const;
};

// Why a predictor cannot be evaluated for this spec, if it cannot.
std::optional<std::string> predictor_domain_error(const ExperimentSpec& spec,
                                                  Predictor p);

// Experiment 1 dispatch weights mu_m = (0.1 + 0.05 floor((m-1)/20)) / 20.
DispatchWeights experiment1_weights();

// b_m = 1 + spread * z_m for z read from a (server, z) CSV fixture.
std::vector<double> size_factors_from_fixture(const std::string& path,
                                              std::size_t server_count,
                                              double spread = 0.1);

// Location of the committed z_m fixture.
std::string default_fixture_path();

// Built-in specs "exp1", "exp2" and "exp3" ("-scaled" suffixes accepted).
ExperimentSpec builtin_experiment(const std::string& name,
                                  Scale scale = Scale::kDesk,
                                  const std::string& fixture = default_fixture_path());
std::vector<std::string> builtin_experiment_names();

struct ResultRow {
  std::string experiment;
  std::string series;
  double x = 0.0;
  uint64_t seed = 0;
  // 1-based server id or "cluster".
  std::string server;
  uint64_t requests = 0;
  uint64_t misses = 0;
  double value = 0.0;
  double stderr_value = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  // Predictor series that could not be evaluated, with the reason.
  std::map<std::string, std::string> errors;

  const ResultRow* find(const std::string& series, double x, uint64_t seed,
                        const std::string& server = "cluster") const;
};

// Runs every sweep point and seed; rows come back in (x, seed, series,
// server) order whatever order the workers finish in.
ResultTable run_experiment(const ExperimentSpec& spec,
                           unsigned threads = 0);

// Header: experiment,series,x,seed,server,requests,misses,value,stderr.
void write_results_csv(std::ostream& out, const ResultTable& table);
ResultTable read_results_csv(std::istream& in);

struct SeriesSummary {
  std::string experiment;
  std::string series;
  std::size_t points = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct ComparisonSummary {
  std::string experiment;
  Comparison comparison;
  std::size_t points = 0;
  double max_relative_error = 0.0;
  double mean_relative_error = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<SeriesSummary> series;
  std::vector<ComparisonSummary> comparisons;
  bool pass() const;
};

// Relative error |series - reference| / reference over matching
// (experiment, x, seed, server) rows with x >= comparison.min_x.
ComparisonSummary compare_series(const ResultTable& table,
                                 const std::string& experiment,
                                 const Comparison& comparison);

// Per-series statistics plus every applicable comparison.
Report emit_report(const ResultTable& table,
                   const std::vector<Comparison>& comparisons =
                       default_comparisons());
void print_report(std::ostream& out, const Report& report);

// Plain-text configuration: `key = value` lines grouped in [sections].
ExperimentSpec load_experiment_config(const std::string& path,
                                      Scale scale = Scale::kDesk);
ClusterConfig load_cluster_config(const std::string& path);

}  // namespace chlru
