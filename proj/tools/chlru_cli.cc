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

// Command-line front end: simulate, predict, ct-solve, oracle, experiment
// and report.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chlru/analytics.h"
#include "chlru/cluster_sim.h"
#include "chlru/format.h"
#include "chlru/harness.h"
#include "chlru/oracle.h"

namespace {

using namespace chlru;

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ExperimentSpec resolve_spec(const std::string& name, const std::string& config,
                            const std::string& scale,
                            std::optional<uint64_t> seed) {
  if (name.empty() == config.empty()) {
    throw CLI::ValidationError("give either an experiment name or --config");
  }
  ExperimentSpec spec = config.empty()
                            ? builtin_experiment(name, parse_scale(scale))
                            : load_experiment_config(config, parse_scale(scale));
  if (seed) spec.seeds = {*seed};
  return spec;
}

int cmd_simulate(const std::string& config, std::optional<uint64_t> seed,
                 std::optional<std::size_t> base_size, const std::string& out) {
  ClusterConfig cfg = load_cluster_config(config);
  if (seed) cfg.seed = *seed;
  if (base_size) cfg.base_size = *base_size;
  const MissStats stats = run(cfg);
  Output o(out);
  write_miss_stats_csv(o.stream(), static_cast<double>(cfg.base_size), stats);
  return 0;
}

int cmd_predict(const ExperimentSpec& spec, const std::string& out) {
  std::vector<PredictionRow> rows;
  ClusterConfig cfg = spec.cluster;
  cfg.seed = spec.seeds.front();
  cfg.base_size = spec.sweep.front();
  const ClusterLayout layout = build_layout(cfg);
  const double c = layout.model.normalizer();
  const auto* weights = std::get_if<DispatchWeights>(&cfg.dispatch);
  for (std::size_t x : spec.sweep) {
    const double xd = static_cast<double>(x);
    cfg.base_size = x;
    const auto caps = cfg.capacities();
    try {
      if (!weights) throw std::domain_error("requires dispatch weights");
      std::vector<double> sizes(caps.begin(), caps.end());
      rows.push_back({xd, "cluster_asymptotic",
                      predict_cluster_miss(cfg.alpha, c, weights->values(), sizes)});
      for (ServerId m : spec.servers) {
        rows.push_back({xd, "theorem1:" + std::to_string(m + 1),
                        predict_server_miss(cfg.alpha, c, (*weights)[m],
                                            layout.assignment.W(m), sizes[m])});
      }
      const double xbar =
          virtual_size(xd, cfg.size_factors, weights->values(), cfg.alpha);
      rows.push_back({xd, "virtual_size", xbar});
      rows.push_back({xd, "ct_approx", ct_miss(layout.model, xbar)});
    } catch (const std::exception& e) {
      std::cerr << "x=" << x << ": " << e.what() << '\n';
    }
  }
  Output o(out);
  write_predictions_csv(o.stream(), rows);
  return 0;
}

int cmd_ct_solve(double alpha, std::size_t catalog, double xbar) {
  const auto model = PopularityModel::zipf(alpha, catalog);
  const double t = ct_time(model, xbar);
  std::cout << "t_C = " << format_value(t) << '\n'
            << "ct_miss = " << format_value(ct_miss_at(model, t)) << '\n'
            << "residual = " << format_value(ct_occupancy(model, t) - xbar) << '\n';
  return 0;
}

int cmd_oracle(std::vector<double> q, std::optional<double> alpha,
               std::optional<std::size_t> catalog,
               std::optional<std::size_t> capacity) {
  if (q.empty()) {
    if (!alpha || !catalog) {
      throw CLI::ValidationError("give --q or both --alpha and --catalog");
    }
    const auto model = PopularityModel::zipf(*alpha, *catalog);
    q.assign(model.probabilities().begin(), model.probabilities().end());
  }
  std::cout << "capacity,miss\n";
  if (capacity) {
    std::cout << *capacity << ',' << format_value(exact_mtf_miss(q, *capacity))
              << '\n';
    return 0;
  }
  const auto result = exact_mtf_distribution(q);
  for (std::size_t x = 1; x < q.size(); ++x) {
    std::cout << x << ',' << format_value(result.miss[x]) << '\n';
  }
  return 0;
}

int cmd_experiment(const ExperimentSpec& spec, std::string out,
                   unsigned threads) {
  const ResultTable table = run_experiment(spec, threads);
  for (const auto& [series, why] : table.errors) {
    std::cerr << "warning: " << series << ": " << why << '\n';
  }
  if (out.empty()) out = spec.output;
  Output o(out == "-" ? "" : out);
  write_results_csv(o.stream(), table);
  if (!out.empty() && out != "-") {
    print_report(std::cerr, emit_report(table, spec.comparisons));
  }
  return 0;
}

int cmd_report(const std::string& csv, const std::string& name,
               const std::string& config, bool check) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open " + csv);
  const ResultTable table = read_results_csv(in);
  std::vector<Comparison> comparisons = default_comparisons();
  if (!config.empty()) {
    comparisons = load_experiment_config(config).comparisons;
  } else if (!name.empty()) {
    comparisons = builtin_experiment(name).comparisons;
  }
  const Report report = emit_report(table, comparisons);
  print_report(std::cout, report);
  if (check && !report.pass()) {
    std::cerr << "tolerance check failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LRU cluster simulator and miss-ratio predictors"};
  app.require_subcommand(1);

  std::string config, out, scale = "desk", name;
  std::optional<uint64_t> seed;
  unsigned threads = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one cluster configuration");
  std::optional<std::size_t> base_size;
  simulate->add_option("--config", config, "Cluster config file")->required();
  simulate->add_option("--seed", seed, "Override the seed");
  simulate->add_option("-x,--base-size", base_size, "Override the base size x");
  simulate->add_option("--out", out, "Output CSV (default stdout)");

  auto* predict = app.add_subcommand("predict", "Evaluate the closed-form predictors");
  predict->add_option("name", name, "Built-in experiment");
  predict->add_option("--config", config, "Experiment config file");
  predict->add_option("--scale", scale, "desk or paper");
  predict->add_option("--seed", seed, "Seed for the hash assignment");
  predict->add_option("--out", out, "Output CSV (default stdout)");

  auto* ct = app.add_subcommand("ct-solve", "Solve for the characteristic time");
  double alpha = 0.0, xbar = 0.0;
  std::size_t catalog = 0;
  ct->add_option("--alpha", alpha, "Zipf exponent")->required();
  ct->add_option("--catalog", catalog, "Catalog size M")->required();
  ct->add_option("--xbar", xbar, "Cache size")->required();

  auto* oracle = app.add_subcommand("oracle", "Exact MTF miss ratio of a tiny catalog");
  std::vector<double> q;
  std::optional<double> oracle_alpha;
  std::optional<std::size_t> oracle_catalog, capacity;
  oracle->add_option("--q", q, "Probabilities, non-increasing")->delimiter(',');
  oracle->add_option("--alpha", oracle_alpha, "Zipf exponent");
  oracle->add_option("--catalog", oracle_catalog, "Zipf catalog size");
  oracle->add_option("--capacity", capacity, "Cache size (default: all)");

  auto* experiment = app.add_subcommand("experiment", "Run a named or file-based experiment");
  experiment->add_option("name", name, "exp1, exp2 or exp3");
  experiment->add_option("--config", config, "Experiment config file");
  experiment->add_option("--scale", scale, "desk or paper");
  experiment->add_option("--seed", seed, "Use this single seed");
  experiment->add_option("--out", out, "Output CSV ('-' for stdout)");
  experiment->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* report = app.add_subcommand("report", "Summarize a results CSV");
  std::string csv;
  bool check = false;
  report->add_option("csv", csv, "Results CSV")->required();
  report->add_option("--experiment", name, "Use this built-in experiment's gates");
  report->add_option("--config", config, "Use this config's gates");
  report->add_flag("--check", check, "Exit nonzero when a gate fails");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(config, seed, base_size, out);
    if (*predict) return cmd_predict(resolve_spec(name, config, scale, seed), out);
    if (*ct) return cmd_ct_solve(alpha, catalog, xbar);
    if (*oracle) return cmd_oracle(q, oracle_alpha, oracle_catalog, capacity);
    if (*experiment) {
      return cmd_experiment(resolve_spec(name, config, scale, seed), out, threads);
    }
    if (*report) return cmd_report(csv, name, config, check);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
