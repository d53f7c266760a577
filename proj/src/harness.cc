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

#include "chlru/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "chlru/analytics.h"
#include "chlru/format.h"
#include "chlru/oracle.h"
#include "chlru/random.h"

#ifndef CHLRU_FIXTURE_PATH
#define CHLRU_FIXTURE_PATH "data/exp1_z.csv"
#endif

namespace chlru {
namespace {

// Series names as they appear in the CSV, in output order.
constexpr const char* kClusterEmpirical = "cluster_empirical";
constexpr const char* kServerEmpirical = "server_empirical";
constexpr const char* kTheorem1 = "theorem1";
constexpr const char* kClusterAsymptotic = "cluster_asymptotic";
constexpr const char* kVirtualEmpirical = "virtual_empirical";
constexpr const char* kCtApprox = "ct_approx";
constexpr const char* kOracle = "oracle";
constexpr const char* kFittedVirtual = "fitted_virtual";
constexpr const char* kFittedScale = "fitted_scale";
constexpr const char* kFitDiscrepancy = "fit_discrepancy";

const std::vector<std::string>& series_order() {
  static const std::vector<std::string> order = {
      kClusterEmpirical, kServerEmpirical, kTheorem1,      kClusterAsymptotic,
      kVirtualEmpirical, kCtApprox,        kOracle,        kFittedVirtual,
      kFittedScale,      kFitDiscrepancy};
  return order;
}

std::size_t series_rank(const std::string& s) {
  const auto& order = series_order();
  const auto it = std::find(order.begin(), order.end(), s);
  return static_cast<std::size_t>(it - order.begin());
}

uint64_t server_rank(const std::string& server) {
  if (server == "cluster") return 0;
  return std::strtoull(server.c_str(), nullptr, 10);
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  return std::make_tuple(a.experiment, a.x, a.seed, series_rank(a.series),
                         server_rank(a.server)) <
         std::make_tuple(b.experiment, b.x, b.seed, series_rank(b.series),
                         server_rank(b.server));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// Per-seed state shared read-only by every sweep point.
struct SeedContext {
  uint64_t seed;
  ClusterLayout layout;
};

struct PointResult {
  std::vector<ResultRow> rows;
  std::map<std::string, std::string> errors;
  CurvePoint cluster;
};

double pooled_scale(const ExperimentSpec& spec) {
  if (spec.virtual_scale) return *spec.virtual_scale;
  const auto& w = std::get<DispatchWeights>(spec.cluster.dispatch);
  return virtual_size(1.0, spec.cluster.size_factors, w.values(),
                      spec.cluster.alpha);
}

std::size_t round_capacity(double v) {
  const double r = std::round(v);
  return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

double cluster_oracle(const ClusterLayout& layout,
                      std::span<const std::size_t> caps) {
  double total = 0.0;
  for (std::size_t m = 0; m < layout.assignment.server_count(); ++m) {
    const auto q = conditional_popularity(layout.assignment, layout.model,
                                          static_cast<ServerId>(m));
    if (q.empty() || caps[m] >= q.size()) continue;
    total += layout.assignment.per_server_mass(static_cast<ServerId>(m)) *
             exact_mtf_miss(q, caps[m]);
  }
  return total;
}

PointResult run_point(const ExperimentSpec& spec, const SeedContext& ctx,
                      std::size_t x) {
  PointResult out;
  ClusterConfig cfg = spec.cluster;
  cfg.base_size = x;
  cfg.seed = ctx.seed;
  const auto caps = cfg.capacities();
  const uint64_t measure = cfg.measure_requests;
  const auto& layout = ctx.layout;
  const auto& assignment = layout.assignment;
  const double xd = static_cast<double>(x);

  auto row = [&](const char* series, const std::string& server, uint64_t r,
                 uint64_t s, double value, double se) {
    out.rows.push_back(
        ResultRow{spec.name, series, xd, ctx.seed, server, r, s, value, se});
  };

  const MissStats stats = simulate_cluster(
      layout, caps, cfg.warmup(), measure, derive_seed(ctx.seed, kRequestStream));
  if (stats.total_requests() != measure) {
    throw std::logic_error("harness: measured request count mismatch");
  }
  out.cluster = {xd, stats.cluster_miss_ratio()};
  row(kClusterEmpirical, "cluster", stats.total_requests(), stats.total_misses(),
      stats.cluster_miss_ratio(), stats.cluster_stderr());
  for (ServerId m : spec.servers) {
    const auto p = stats.server_miss_ratio(m);
    const auto se = stats.server_stderr(m);
    row(kServerEmpirical, std::to_string(m + 1), stats.requests[m],
        stats.misses[m], p.value_or(std::nan("")), se.value_or(std::nan("")));
  }

  const double alpha = cfg.alpha;
  const double c = layout.model.normalizer();
  const auto* weights = std::get_if<DispatchWeights>(&cfg.dispatch);

  if (spec.wants(Predictor::kTheorem1)) {
    for (ServerId m : spec.servers) {
      try {
        row(kTheorem1, std::to_string(m + 1), 0, 0,
            predict_server_miss(alpha, c, (*weights)[m], assignment.W(m),
                                static_cast<double>(caps[m])),
            0.0);
      } catch (const std::exception& e) {
        out.errors[kTheorem1] = "server " + std::to_string(m + 1) + ": " + e.what();
      }
    }
  }
  if (spec.wants(Predictor::kClusterAsymptotic)) {
    std::vector<double> sizes(caps.begin(), caps.end());
    row(kClusterAsymptotic, "cluster", 0, 0,
        predict_cluster_miss(alpha, c, weights->values(), sizes), 0.0);
  }
  if (spec.wants(Predictor::kVirtualEquivalence) ||
      spec.wants(Predictor::kCtApprox)) {
    const double xbar = pooled_scale(spec) * xd;
    if (spec.wants(Predictor::kVirtualEquivalence)) {
      const std::size_t cap = round_capacity(xbar);
      const std::size_t warm_cap[] = {cap};
      const MissStats v = run_virtual(layout.model, layout.sampler, cap,
                                      default_warmup(warm_cap), measure, ctx.seed);
      row(kVirtualEmpirical, "cluster", v.total_requests(), v.total_misses(),
          v.cluster_miss_ratio(), v.cluster_stderr());
    }
    if (spec.wants(Predictor::kCtApprox)) {
      try {
        row(kCtApprox, "cluster", 0, 0, ct_miss(layout.model, xbar), 0.0);
      } catch (const std::exception& e) {
        out.errors[kCtApprox] = "x=" + std::to_string(x) + ": " + e.what();
      }
    }
  }
  if (spec.wants(Predictor::kOracle)) {
    try {
      row(kOracle, "cluster", 0, 0, cluster_oracle(layout, caps), 0.0);
    } catch (const std::exception& e) {
      out.errors[kOracle] = e.what();
    }
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string predictor_name(Predictor p) {
  switch (p) {
    case Predictor::kTheorem1: return "theorem1";
    case Predictor::kClusterAsymptotic: return "cluster_asymptotic";
    case Predictor::kVirtualEquivalence: return "virtual_equivalence";
    case Predictor::kCtApprox: return "ct_approx";
    case Predictor::kOracle: return "oracle";
    case Predictor::kFittedVirtual: return "fitted_virtual";
  }
  return "unknown";
}

Predictor parse_predictor(const std::string& name) {
  for (Predictor p : {Predictor::kTheorem1, Predictor::kClusterAsymptotic,
                      Predictor::kVirtualEquivalence, Predictor::kCtApprox,
                      Predictor::kOracle, Predictor::kFittedVirtual}) {
    if (predictor_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown predictor '" + name + "'");
}

Scale parse_scale(const std::string& name) {
  if (name == "desk") return Scale::kDesk;
  if (name == "paper") return Scale::kPaper;
  throw std::invalid_argument("unknown scale '" + name + "' (desk|paper)");
}

std::vector<Comparison> default_comparisons() {
  return {
      {kTheorem1, kServerEmpirical, 0.12},
      {kClusterAsymptotic, kClusterEmpirical, 0.08},
      {kVirtualEmpirical, kClusterEmpirical, 0.05},
      {kCtApprox, kVirtualEmpirical, 0.05},
      {kOracle, kClusterEmpirical, 0.05},
      {kFittedVirtual, kClusterEmpirical, 0.05, 0.0, true},
  };
}

bool ExperimentSpec::wants(Predictor p) const {
  return std::find(predictors.begin(), predictors.end(), p) != predictors.end();
}

void ExperimentSpec::validate() const {
  if (name.empty() || name.find(',') != std::string::npos) {
    throw std::invalid_argument("experiment: name must be non-empty, no commas");
  }
  if (sweep.empty()) throw std::invalid_argument("experiment: empty sweep");
  for (std::size_t j = 0; j < sweep.size(); ++j) {
    if (sweep[j] == 0 || (j > 0 && sweep[j] <= sweep[j - 1])) {
      throw std::invalid_argument("experiment: sweep must be strictly increasing "
                                  "positive sizes");
    }
  }
  if (seeds.empty()) throw std::invalid_argument("experiment: no seeds");
  for (ServerId m : servers) {
    if (m >= cluster.server_count()) {
      throw std::invalid_argument("experiment: reported server out of range");
    }
  }
  ClusterConfig probe = cluster;
  probe.base_size = sweep.front();
  probe.validate();
}

std::optional<std::string> predictor_domain_error(const ExperimentSpec& spec,
                                                  Predictor p) {
  const bool suha = std::holds_alternative<DispatchWeights>(spec.cluster.dispatch);
  const double alpha = spec.cluster.alpha;
  switch (p) {
    case Predictor::kTheorem1:
    case Predictor::kClusterAsymptotic:
      if (!(alpha > 1.0)) return "requires alpha > 1";
      if (!suha) return "requires uniform-hashing dispatch weights";
      return std::nullopt;
    case Predictor::kVirtualEquivalence:
    case Predictor::kCtApprox:
      if (spec.virtual_scale) return std::nullopt;
      if (!(alpha > 1.0)) return "requires alpha > 1 or an explicit virtual_scale";
      if (!suha) return "requires dispatch weights or an explicit virtual_scale";
      return std::nullopt;
    case Predictor::kOracle:
      if (spec.cluster.catalog_size >
          kMaxExactCatalog * spec.cluster.server_count()) {
        return "catalog too large for exact enumeration";
      }
      return std::nullopt;
    case Predictor::kFittedVirtual:
      if (spec.fit.seeds.size() < 3) return "fit needs at least 3 seeds";
      return std::nullopt;
  }
  return "unknown predictor";
}

DispatchWeights experiment1_weights() {
  std::vector<double> mu(100);
  for (std::size_t m = 1; m <= 100; ++m) {
    mu[m - 1] = (0.1 + 0.05 * static_cast<double>((m - 1) / 20)) / 20.0;
  }
  return DispatchWeights(std::move(mu));
}

std::string default_fixture_path() {
  if (const char* env = std::getenv("CHLRU_FIXTURE")) return env;
  return CHLRU_FIXTURE_PATH;
}

std::vector<double> size_factors_from_fixture(const std::string& path,
                                              std::size_t server_count,
                                              double spread) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open z fixture " + path);
  std::vector<double> z(server_count, std::nan(""));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2) throw std::runtime_error("bad fixture line: " + line);
    const auto m = std::stoull(cols[0]);
    if (m >= 1 && m <= server_count) z[m - 1] = std::stod(cols[1]);
  }
  std::vector<double> b(server_count);
  for (std::size_t m = 0; m < server_count; ++m) {
    if (std::isnan(z[m])) {
      throw std::runtime_error("fixture " + path + " lacks server " +
                               std::to_string(m + 1));
    }
    b[m] = 1.0 + spread * z[m];
  }
  return b;
}

std::vector<std::string> builtin_experiment_names() {
  return {"exp1", "exp2", "exp3"};
}

ExperimentSpec builtin_experiment(const std::string& requested, Scale scale,
                                  const std::string& fixture) {
  std::string name = requested;
  if (const auto pos = name.find("-scaled"); pos != std::string::npos) {
    name = name.substr(0, pos);
  }
  const bool paper = scale == Scale::kPaper;
  ExperimentSpec spec;
  spec.name = name + (paper ? "-paper" : "-scaled");
  spec.seeds = {2018};
  spec.cluster.size_factors = size_factors_from_fixture(fixture, 100);
  spec.cluster.warmup_requests =
      paper ? std::optional<uint64_t>(100'000'000) : std::nullopt;

  if (name == "exp1" || name == "exp2") {
    spec.cluster.dispatch = experiment1_weights();
    spec.cluster.alpha = 1.55;
    spec.cluster.catalog_size = paper ? 10'000'000 : 1'000'000;
    spec.cluster.measure_requests = paper ? 1'000'000'000 : 100'000'000;
    spec.sweep = {40, 60, 80, 100, 120, 140, 160, 180, 200};
    if (name == "exp1") {
      spec.servers = {10, 29, 60, 70, 95};
      spec.predictors = {Predictor::kTheorem1, Predictor::kClusterAsymptotic};
      spec.comparisons = {{kTheorem1, kServerEmpirical, 0.12, 100.0},
                          {kClusterAsymptotic, kClusterEmpirical, 0.08, 200.0}};
    } else {
      spec.predictors = {Predictor::kClusterAsymptotic,
                         Predictor::kVirtualEquivalence, Predictor::kCtApprox};
      spec.comparisons = {{kVirtualEmpirical, kClusterEmpirical, 0.05, 80.0},
                          {kCtApprox, kVirtualEmpirical, 0.05, 80.0}};
    }
  } else if (name == "exp3") {
    spec.cluster.dispatch = RingDispatch{2000, 15881};
    spec.cluster.alpha = 0.8;
    spec.cluster.catalog_size = 10'000;
    spec.cluster.measure_requests = paper ? 1'000'000'000 : 10'000'000;
    spec.sweep = {10, 20, 30, 40, 50, 60};
    spec.predictors = {Predictor::kFittedVirtual};
    spec.fit.lo = 20.0;
    spec.fit.hi = 150.0;
    spec.fit.measure = paper ? 100'000'000 : 2'000'000;
    spec.comparisons = {{kFittedVirtual, kClusterEmpirical, 0.05, 0.0, true}};
  } else {
    throw std::invalid_argument("unknown built-in experiment '" + requested + "'");
  }
  spec.output = spec.name + ".csv";
  return spec;
}

const ResultRow* ResultTable::find(const std::string& series, double x,
                                   uint64_t seed,
                                   const std::string& server) const {
  for (const auto& r : rows) {
    if (r.series == series && r.x == x && r.seed == seed && r.server == server) {
      return &r;
    }
  }
  return nullptr;
}

ResultTable run_experiment(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  ResultTable table;
  ExperimentSpec effective = spec;
  effective.predictors.clear();
  for (Predictor p : spec.predictors) {
    if (auto err = predictor_domain_error(spec, p)) {
      table.errors[predictor_name(p)] = *err;
    } else {
      effective.predictors.push_back(p);
    }
  }

  std::vector<std::unique_ptr<SeedContext>> contexts;
  for (uint64_t seed : effective.seeds) {
    ClusterConfig cfg = effective.cluster;
    cfg.seed = seed;
    cfg.base_size = effective.sweep.front();
    contexts.push_back(std::make_unique<SeedContext>(
        SeedContext{seed, build_layout(cfg)}));
  }

  const std::size_t points = effective.sweep.size();
  std::vector<PointResult> results(contexts.size() * points);
  parallel_for(results.size(), threads, [&](std::size_t task) {
    results[task] = run_point(effective, *contexts[task / points],
                              effective.sweep[task % points]);
  });

  if (effective.wants(Predictor::kFittedVirtual)) {
    for (std::size_t s = 0; s < contexts.size(); ++s) {
      const SeedContext& ctx = *contexts[s];
      std::vector<CurvePoint> curve;
      for (std::size_t j = 0; j < points; ++j) {
        curve.push_back(results[s * points + j].cluster);
      }
      FitOptions options;
      options.lo = effective.fit.lo;
      options.hi = effective.fit.hi;
      options.seeds = effective.fit.seeds;
      options.tolerance = effective.fit.tolerance;
      options.resolution =
          0.25 / static_cast<double>(effective.sweep.back());
      const uint64_t fit_measure = effective.fit.measure;
      auto runner = [&](std::size_t cap, uint64_t fit_seed) {
        const std::size_t warm_cap[] = {cap};
        return run_virtual(ctx.layout.model, ctx.layout.sampler, cap,
                           default_warmup(warm_cap), fit_measure,
                           derive_seed(ctx.seed, 0x100 + fit_seed))
            .cluster_miss_ratio();
      };
      const FitResult fit = fit_virtual_size(curve, runner, options);
      auto& rows = results[s * points].rows;
      for (std::size_t j = 0; j < points; ++j) {
        if (fit.fitted.size() != points) break;
        rows.push_back(ResultRow{effective.name, kFittedVirtual, curve[j].x,
                                 ctx.seed, "cluster", 0, 0, fit.fitted[j], 0.0});
      }
      rows.push_back(ResultRow{effective.name, kFittedScale, 0.0, ctx.seed,
                               "cluster", 0, 0, fit.scale, 0.0});
      rows.push_back(ResultRow{effective.name, kFitDiscrepancy, 0.0, ctx.seed,
                               "cluster", 0, 0, fit.discrepancy, 0.0});
      if (!fit.ok) table.errors[kFittedVirtual] = fit.diagnostics;
    }
  }

  for (auto& r : results) {
    table.rows.insert(table.rows.end(), r.rows.begin(), r.rows.end());
    table.errors.insert(r.errors.begin(), r.errors.end());
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), row_less);
  return table;
}

void write_results_csv(std::ostream& out, const ResultTable& table) {
  out << "experiment,series,x,seed,server,requests,misses,value,stderr\n";
  for (const auto& r : table.rows) {
    out << r.experiment << ',' << r.series << ',' << format_value(r.x) << ','
        << r.seed << ',' << r.server << ',' << r.requests << ',' << r.misses
        << ',' << format_value(r.value) << ',' << format_value(r.stderr_value)
        << '\n';
  }
}

ResultTable read_results_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results: empty input");
  if (trim(line) != "experiment,series,x,seed,server,requests,misses,value,stderr") {
    throw std::runtime_error("results: unexpected header '" + trim(line) + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto c = split(trim(line), ',');
    if (c.size() != 9) {
      throw std::runtime_error("results: line " + std::to_string(lineno) +
                               " has " + std::to_string(c.size()) + " fields");
    }
    table.rows.push_back(ResultRow{c[0], c[1], std::stod(c[2]), std::stoull(c[3]),
                                   c[4], std::stoull(c[5]), std::stoull(c[6]),
                                   std::stod(c[7]), std::stod(c[8])});
  }
  return table;
}

bool Report::pass() const {
  return std::all_of(comparisons.begin(), comparisons.end(),
                     [](const ComparisonSummary& c) { return c.pass; });
}

ComparisonSummary compare_series(const ResultTable& table,
                                 const std::string& experiment,
                                 const Comparison& comparison) {
  ComparisonSummary out{experiment, comparison};
  std::map<std::tuple<double, uint64_t, std::string>, double> reference;
  for (const auto& r : table.rows) {
    if (r.experiment == experiment && r.series == comparison.reference) {
      reference[{r.x, r.seed, r.server}] = r.value;
    }
  }
  double sum = 0.0;
  for (const auto& r : table.rows) {
    if (r.experiment != experiment || r.series != comparison.series ||
        r.x < comparison.min_x) {
      continue;
    }
    const auto it = reference.find({r.x, r.seed, r.server});
    if (it == reference.end()) continue;
    const double err = r.value == it->second
                           ? 0.0
                           : std::fabs(r.value - it->second) / std::fabs(it->second);
    ++out.points;
    sum += err;
    out.max_relative_error = std::max(out.max_relative_error,
                                      std::isnan(err) ? INFINITY : err);
  }
  if (out.points > 0) {
    out.mean_relative_error = sum / static_cast<double>(out.points);
  }
  const double gated = comparison.gate_on_mean ? out.mean_relative_error
                                               : out.max_relative_error;
  out.pass = out.points > 0 && gated <= comparison.tolerance;
  return out;
}

Report emit_report(const ResultTable& table,
                   const std::vector<Comparison>& comparisons) {
  Report report;
  std::map<std::pair<std::string, std::string>, SeriesSummary> by_series;
  std::vector<std::string> experiments;
  for (const auto& r : table.rows) {
    if (std::find(experiments.begin(), experiments.end(), r.experiment) ==
        experiments.end()) {
      experiments.push_back(r.experiment);
    }
    auto [it, fresh] = by_series.try_emplace({r.experiment, r.series});
    SeriesSummary& s = it->second;
    if (fresh) {
      s.experiment = r.experiment;
      s.series = r.series;
      s.min = s.max = r.value;
    }
    s.min = std::min(s.min, r.value);
    s.max = std::max(s.max, r.value);
    s.mean += (r.value - s.mean) / static_cast<double>(++s.points);
  }
  for (auto& [key, s] : by_series) report.series.push_back(s);
  for (const auto& e : experiments) {
    for (const auto& c : comparisons) {
      auto summary = compare_series(table, e, c);
      if (summary.points > 0) report.comparisons.push_back(summary);
    }
  }
  return report;
}

void print_report(std::ostream& out, const Report& report) {
  for (const auto& s : report.series) {
    out << s.experiment << "  " << s.series << ": n=" << s.points
        << " min=" << format_value(s.min) << " max=" << format_value(s.max)
        << " mean=" << format_value(s.mean) << '\n';
  }
  for (const auto& c : report.comparisons) {
    out << (c.pass ? "PASS " : "FAIL ") << c.experiment << "  "
        << c.comparison.series << " vs " << c.comparison.reference
        << " (x>=" << format_value(c.comparison.min_x) << "): n=" << c.points
        << " max_rel=" << format_value(c.max_relative_error)
        << " mean_rel=" << format_value(c.mean_relative_error)
        << " tol=" << format_value(c.comparison.tolerance)
        << (c.comparison.gate_on_mean ? " (mean)" : " (max)") << '\n';
  }
}

}  // namespace chlru
