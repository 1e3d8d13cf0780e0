// Copyright 2026 The sensorplace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sensorplace/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <omp.h>
#include <spdlog/spdlog.h>

#include "csv.h"

namespace sensorplace {

using nlohmann::json;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::kMae ? "MAE" : "RMSE";
}

Metric parse_metric(std::string_view text) {
  if (text == "MAE" || text == "mae") return Metric::kMae;
  if (text == "RMSE" || text == "rmse") return Metric::kRmse;
  throw Error(ErrorKind::kConfiguration, "unknown metric '" + std::string(text) + "'");
}

EvaluationResult compute_error(std::span<const double> truth, std::span<const double> predicted,
                               Metric metric) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorKind::kShape, "compute_error: " + std::to_string(truth.size()) +
                                       " targets but " + std::to_string(predicted.size()) +
                                       " predictions");
  }
  if (truth.empty()) throw Error(ErrorKind::kArity, "compute_error: no values");
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - predicted[i];
    acc += metric == Metric::kMae ? std::abs(e) : e * e;
  }
  acc /= static_cast<double>(truth.size());
  return {metric, metric == Metric::kMae ? acc : std::sqrt(acc), truth.size()};
}

// ---------------------------------------------------------------------------
// Evaluator

Evaluator::Evaluator(const Dataset& dataset, SplitAssignment split)
    : dataset_(&dataset), split_(std::move(split)) {
  if (split_.train.empty() || split_.test.empty()) {
    throw Error(ErrorKind::kEvaluation, "split needs training and test segments");
  }
  features_ = std::make_unique<ModelFeatures>(dataset, split_.train);
  TrainingRows test = features_->observation_rows(split_.test);
  if (test.targets.empty()) {
    throw Error(ErrorKind::kEvaluation, "test segments have no observations");
  }
  test_rows_ = std::move(test.features);
  test_targets_ = std::move(test.targets);
}

std::vector<EvaluationResult> Evaluator::evaluate_rows(const TrainingRows& rows,
                                                       const RegressorConfig& config,
                                                       std::span<const Metric> metrics,
                                                       const RegressorTrainer* trainer) const {
  if (rows.targets.empty()) {
    throw Error(ErrorKind::kEvaluation, "deployment produced no training rows");
  }
  std::vector<double> predicted;
  if (trainer != nullptr) {
    predicted = (*trainer)(rows.features, rows.targets, config.seed)->predict(test_rows_);
  } else {
    predicted = fit_regressor(config, rows.features, rows.targets).predict(test_rows_);
  }
  std::vector<EvaluationResult> out;
  for (Metric m : metrics) out.push_back(compute_error(test_targets_, predicted, m));
  return out;
}

std::vector<EvaluationResult> Evaluator::evaluate(const Placement& placement,
                                                  const DeploymentPlan* plan,
                                                  const RegressorConfig& config,
                                                  std::span<const Metric> metrics,
                                                  const RegressorTrainer* trainer) const {
  for (SegmentId id : placement.selected) {
    if (!std::binary_search(split_.train.begin(), split_.train.end(), id)) {
      throw Error(ErrorKind::kEvaluation,
                  "placement segment " + std::to_string(id) + " is not a training segment");
    }
  }
  if (plan == nullptr) {
    return evaluate_rows(features_->observation_rows(placement.selected), config, metrics,
                         trainer);
  }
  const TrainingRows rows = extract_training_rows(*plan, *features_);
  if (rows.gaps > 0) {
    spdlog::info("deployment plan {}: {} entries without observations", plan->scheme.label(),
                 rows.gaps);
  }
  return evaluate_rows(rows, config, metrics, trainer);
}

std::vector<EvaluationResult> evaluate_placement(const Dataset& dataset,
                                                 const SplitAssignment& split,
                                                 const Placement& placement,
                                                 const DeploymentPlan* plan,
                                                 const RegressorConfig& config,
                                                 std::span<const Metric> metrics) {
  return Evaluator(dataset, split).evaluate(placement, plan, config, metrics);
}

// ---------------------------------------------------------------------------
// Report

std::string config_digest(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void BenchmarkReport::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    if (a.budget != b.budget) return a.budget < b.budget;
    return a.metric < b.metric;
  });
}

namespace {
const std::vector<std::string> kReportHeader = {
    "city", "strategy", "feature_subset", "budget", "deployment", "scheme",
    "metric", "value", "n", "seed", "config_digest"};
}  // namespace

std::string BenchmarkReport::to_csv() const {
  std::ostringstream out;
  csv::write_row(out, kReportHeader);
  for (const ReportRow& r : rows) {
    const std::vector<std::string> cells = {
        r.city, r.strategy, r.feature_subset, std::to_string(r.budget), r.deployment, r.scheme,
        r.metric, std::isfinite(r.value) ? format_double(r.value) : "", std::to_string(r.n),
        std::to_string(r.seed), r.config_digest};
    csv::write_row(out, cells);
  }
  return out.str();
}

BenchmarkReport BenchmarkReport::from_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  std::vector<std::size_t> col;
  for (const std::string& name : kReportHeader) col.push_back(t.require(name));
  BenchmarkReport report;
  report.experiment = path.stem().string();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& c = t.rows[r];
    ReportRow row;
    row.city = c[col[0]];
    row.strategy = c[col[1]];
    row.feature_subset = c[col[2]];
    auto budget = csv::to_int(c[col[3]]);
    auto n = csv::to_int(c[col[8]]);
    auto seed = csv::to_int(c[col[9]]);
    if (!budget || !n || !seed) {
      throw Error(ErrorKind::kParse, path.filename().string() + " row " + std::to_string(r + 2) +
                                         ": malformed integer");
    }
    row.budget = static_cast<int>(*budget);
    row.deployment = c[col[4]];
    row.scheme = c[col[5]];
    row.metric = c[col[6]];
    if (c[col[7]].empty()) {
      row.value = kNaN;
    } else if (auto v = csv::to_double(c[col[7]])) {
      row.value = *v;
    } else {
      throw Error(ErrorKind::kParse, path.filename().string() + " row " + std::to_string(r + 2) +
                                         ": malformed value");
    }
    row.n = static_cast<std::size_t>(*n);
    row.seed = static_cast<std::uint64_t>(*seed);
    row.config_digest = c[col[10]];
    report.rows.push_back(std::move(row));
  }
  const auto sidecar = std::filesystem::path(path).replace_extension(".json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    try {
      report.metadata = json::parse(in);
      report.experiment = report.metadata.value("experiment", report.experiment);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, sidecar.filename().string() + ": " + e.what());
    }
  }
  return report;
}

void BenchmarkReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kBundle, "cannot write " + (dir / "report.csv").string());
    out << to_csv();
  }
  json meta = metadata;
  meta["experiment"] = experiment;
  meta["rows"] = rows.size();
  std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kBundle, "cannot write " + (dir / "report.json").string());
  out << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Config documents

namespace {

json seeds_json(const std::vector<std::uint64_t>& seeds) { return json(seeds); }

std::vector<std::uint64_t> require_seeds(const json& doc, const char* what) {
  if (!doc.contains("seeds")) {
    throw Error(ErrorKind::kConfiguration, std::string(what) + ": 'seeds' is required");
  }
  auto seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  if (seeds.empty()) throw Error(ErrorKind::kConfiguration, std::string(what) + ": no seeds");
  return seeds;
}

template <typename F>
void with_fields(const json& doc, const char* what, std::initializer_list<const char*> known,
                 F&& body) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::kConfiguration, std::string(what) + " config must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end()) {
      throw Error(ErrorKind::kConfiguration,
                  std::string(what) + ": unknown field '" + key + "'");
    }
  }
  try {
    body();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string(what) + ": " + e.what());
  }
}

std::vector<StrategyDescriptor> parse_strategies(const json& list) {
  std::vector<StrategyDescriptor> out;
  for (const json& s : list) out.push_back(StrategyDescriptor::parse(s.get<std::string>()));
  return out;
}

json strategy_labels(const std::vector<StrategyDescriptor>& list) {
  json out = json::array();
  for (const auto& s : list) out.push_back(s.label());
  return out;
}

}  // namespace

json SpatialBenchmarkConfig::to_json() const {
  return {{"city", city},
          {"budgets", budgets},
          {"strategies", strategy_labels(strategies)},
          {"seeds", seeds_json(seeds)},
          {"random_repetitions", random_repetitions},
          {"include_random", include_random},
          {"include_existing", include_existing},
          {"include_all_training", include_all_training},
          {"extend_existing", extend_existing},
          {"regressor", regressor.to_json()},
          {"active_learning", active_learning.to_json()},
          {"greedy_cells_per_side", greedy_cells_per_side}};
}

SpatialBenchmarkConfig SpatialBenchmarkConfig::from_json(const json& doc) {
  SpatialBenchmarkConfig c;
  with_fields(doc, "spatial benchmark",
              {"city", "budgets", "strategies", "seeds", "random_repetitions", "include_random",
               "include_existing", "include_all_training", "extend_existing", "regressor",
               "active_learning", "greedy_cells_per_side"},
              [&] {
                c.city = doc.value("city", c.city);
                c.budgets = doc.value("budgets", c.budgets);
                if (doc.contains("strategies")) c.strategies = parse_strategies(doc["strategies"]);
                c.seeds = require_seeds(doc, "spatial benchmark");
                c.random_repetitions = doc.value("random_repetitions", c.random_repetitions);
                c.include_random = doc.value("include_random", c.include_random);
                c.include_existing = doc.value("include_existing", c.include_existing);
                c.include_all_training = doc.value("include_all_training", c.include_all_training);
                c.extend_existing = doc.value("extend_existing", c.extend_existing);
                if (doc.contains("regressor")) c.regressor = RegressorConfig::from_json(doc["regressor"]);
                if (doc.contains("active_learning")) {
                  c.active_learning = ActiveLearningConfig::from_json(doc["active_learning"]);
                }
                c.greedy_cells_per_side = doc.value("greedy_cells_per_side", c.greedy_cells_per_side);
              });
  c.regressor.validate();
  if (c.random_repetitions < 1) {
    throw Error(ErrorKind::kConfiguration, "random_repetitions must be positive");
  }
  return c;
}

json TemporalBenchmarkConfig::to_json() const {
  json schemes_json = json::array();
  for (const Scheme& s : schemes) schemes_json.push_back(s.label());
  return {{"city", city},
          {"schemes", std::move(schemes_json)},
          {"day_budgets", day_budgets},
          {"placement_strategy", placement_strategy.label()},
          {"seeds", seeds_json(seeds)},
          {"regressor", regressor.to_json()},
          {"active_learning", active_learning.to_json()},
          {"greedy_cells_per_side", greedy_cells_per_side}};
}

TemporalBenchmarkConfig TemporalBenchmarkConfig::from_json(const json& doc) {
  TemporalBenchmarkConfig c;
  with_fields(doc, "temporal benchmark",
              {"city", "schemes", "day_budgets", "placement_strategy", "seeds", "regressor",
               "active_learning", "greedy_cells_per_side"},
              [&] {
                c.city = doc.value("city", c.city);
                if (doc.contains("schemes")) {
                  c.schemes.clear();
                  for (const json& s : doc["schemes"]) {
                    c.schemes.push_back(Scheme::parse(s.get<std::string>()));
                  }
                }
                c.day_budgets = doc.at("day_budgets").get<std::vector<int>>();
                if (doc.contains("placement_strategy")) {
                  c.placement_strategy =
                      StrategyDescriptor::parse(doc["placement_strategy"].get<std::string>());
                }
                c.seeds = require_seeds(doc, "temporal benchmark");
                if (doc.contains("regressor")) c.regressor = RegressorConfig::from_json(doc["regressor"]);
                if (doc.contains("active_learning")) {
                  c.active_learning = ActiveLearningConfig::from_json(doc["active_learning"]);
                }
                c.greedy_cells_per_side = doc.value("greedy_cells_per_side", c.greedy_cells_per_side);
              });
  c.regressor.validate();
  return c;
}

json ComparisonConfig::to_json() const {
  return {{"city", city},
          {"strategy", strategy.label()},
          {"budgets", budgets},
          {"seeds", seeds_json(seeds)},
          {"curve_step", curve_step},
          {"curve_max", curve_max},
          {"scheme", scheme.label()},
          {"regressor", regressor.to_json()},
          {"active_learning", active_learning.to_json()},
          {"greedy_cells_per_side", greedy_cells_per_side}};
}

ComparisonConfig ComparisonConfig::from_json(const json& doc) {
  ComparisonConfig c;
  with_fields(doc, "comparison",
              {"city", "strategy", "budgets", "seeds", "curve_step", "curve_max", "scheme",
               "regressor", "active_learning", "greedy_cells_per_side"},
              [&] {
                c.city = doc.value("city", c.city);
                if (doc.contains("strategy")) {
                  c.strategy = StrategyDescriptor::parse(doc["strategy"].get<std::string>());
                }
                c.budgets = doc.at("budgets").get<std::vector<int>>();
                c.seeds = require_seeds(doc, "comparison");
                c.curve_step = doc.value("curve_step", c.curve_step);
                c.curve_max = doc.value("curve_max", c.curve_max);
                if (doc.contains("scheme")) c.scheme = Scheme::parse(doc["scheme"].get<std::string>());
                if (doc.contains("regressor")) c.regressor = RegressorConfig::from_json(doc["regressor"]);
                if (doc.contains("active_learning")) {
                  c.active_learning = ActiveLearningConfig::from_json(doc["active_learning"]);
                }
                c.greedy_cells_per_side = doc.value("greedy_cells_per_side", c.greedy_cells_per_side);
              });
  c.regressor.validate();
  if (c.curve_step < 1) throw Error(ErrorKind::kConfiguration, "curve_step must be positive");
  return c;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

json environment_metadata() {
  return {{"library", "sensorplace"},
          {"version", "0.1.0"},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"openmp_max_threads", omp_get_max_threads()}};
}

PlacementInputs inputs_for(const Evaluator& ev, const ActiveLearningConfig& al,
                           double cells_per_side) {
  PlacementInputs in;
  in.dataset = &ev.dataset();
  in.features = &ev.features();
  in.candidates = ev.split().train;
  in.active_learning = al;
  in.greedy_cells_per_side = cells_per_side;
  if (!ev.dataset().graph.empty()) {
    in.betweenness = std::make_shared<CentralityScores>(
        centrality_scores(ev.dataset().graph, CentralityKind::kBetweenness));
    in.closeness = std::make_shared<CentralityScores>(
        centrality_scores(ev.dataset().graph, CentralityKind::kCloseness));
  }
  return in;
}

ReportRow make_row(const std::string& city, const StrategyDescriptor* strategy,
                   const std::string& strategy_name, int budget, const std::string& deployment,
                   const std::string& scheme, const EvaluationResult& r, std::uint64_t seed,
                   const std::string& digest) {
  ReportRow row;
  row.city = city;
  row.strategy = strategy_name;
  if (strategy != nullptr && strategy->uses_features()) {
    row.feature_subset = strategy->feature_subset.label();
  }
  row.budget = budget;
  row.deployment = deployment;
  row.scheme = scheme;
  row.metric = std::string(to_string(r.metric));
  row.value = r.value;
  row.n = r.n;
  row.seed = seed;
  row.config_digest = digest;
  return row;
}

Placement placement_with_context(const StrategyDescriptor& s, const PlacementInputs& in,
                                 int budget, std::span<const SegmentId> initial,
                                 std::uint64_t seed) {
  try {
    return place(s, in, budget, initial, seed);
  } catch (const Error& e) {
    throw Error(e.kind(), s.label() + ": " + e.what());
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Placement fixed_placement(StrategyFamily family, std::vector<SegmentId> ids, std::uint64_t seed) {
  Placement p;
  p.strategy.family = family;
  p.selected = std::move(ids);
  p.budget = static_cast<int>(p.selected.size());
  p.seed = seed;
  return p;
}

}  // namespace

BenchmarkReport run_spatial_benchmark(const Evaluator& ev, const SpatialBenchmarkConfig& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorKind::kConfiguration, "spatial benchmark needs seeds");
  const Dataset& ds = ev.dataset();
  const auto& train = ev.split().train;
  BenchmarkReport report;
  report.experiment = "spatial";
  const std::string digest = config_digest(
      {{"experiment", "spatial"}, {"config", cfg.to_json()}, {"split", ev.split().to_json()}});

  std::vector<SegmentId> existing;
  for (SegmentId id : ds.existing_sensors) {
    if (std::binary_search(train.begin(), train.end(), id)) existing.push_back(id);
  }
  std::set<int> budget_set(cfg.budgets.begin(), cfg.budgets.end());
  if (!existing.empty()) budget_set.insert(static_cast<int>(existing.size()));
  std::vector<int> budgets;
  json skipped = json::array();
  for (int k : budget_set) {
    const bool too_small = cfg.extend_existing && k < static_cast<int>(existing.size());
    if (k < 1 || k > static_cast<int>(train.size()) || too_small) {
      skipped.push_back(k);
      spdlog::warn("spatial benchmark: skipping budget {}", k);
      continue;
    }
    budgets.push_back(k);
  }
  if (budgets.empty()) throw Error(ErrorKind::kBudget, "no feasible budget");
  const int max_budget = budgets.back();
  std::vector<SegmentId> initial;
  if (cfg.extend_existing) initial = existing;

  PlacementInputs in = inputs_for(ev, cfg.active_learning, cfg.greedy_cells_per_side);
  for (const StrategyDescriptor& s : cfg.strategies) {
    if (s.family == StrategyFamily::kExisting || s.family == StrategyFamily::kAllTraining) {
      throw Error(ErrorKind::kConfiguration,
                  s.label() + ": baselines are configured with include_* flags");
    }
  }

  for (std::uint64_t seed : cfg.seeds) {
    for (const StrategyDescriptor& s : cfg.strategies) {
      if (s.family == StrategyFamily::kRandom) continue;
      const Placement full = placement_with_context(s, in, max_budget, initial, seed);
      for (int k : budgets) {
        const Placement p = full.truncated(k);
        for (const auto& r : ev.evaluate(p, nullptr, cfg.regressor)) {
          report.rows.push_back(
              make_row(cfg.city, &s, s.label(), k, "permanent", "", r, seed, digest));
        }
      }
    }
    if (cfg.include_random) {
      const std::size_t reps = static_cast<std::size_t>(cfg.random_repetitions);
      for (int k : budgets) {
        std::vector<Placement> draws;
        if (initial.empty()) {
          draws = random_placements(train, k, cfg.random_repetitions, seed);
        } else {
          StrategyDescriptor random;
          random.family = StrategyFamily::kRandom;
          for (std::size_t r = 0; r < reps; ++r) {
            draws.push_back(place(random, in, k, initial, seed + r));
          }
        }
        std::vector<double> mae(reps);
        std::vector<double> rmse(reps);
        std::size_t n = 0;
        const auto count = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t r = 0; r < count; ++r) {
          const auto res = ev.evaluate(draws[static_cast<std::size_t>(r)], nullptr, cfg.regressor);
          mae[static_cast<std::size_t>(r)] = res[0].value;
          rmse[static_cast<std::size_t>(r)] = res[1].value;
          if (r == 0) n = res[0].n;
        }
        for (const auto& [metric, values] :
             {std::pair{Metric::kMae, &mae}, std::pair{Metric::kRmse, &rmse}}) {
          const auto [lo, hi] = std::minmax_element(values->begin(), values->end());
          const std::pair<const char*, double> stats[] = {
              {"random_min", *lo}, {"random_median", median(*values)}, {"random_max", *hi}};
          for (const auto& [name, value] : stats) {
            report.rows.push_back(make_row(cfg.city, nullptr, name, k, "permanent", "",
                                           {metric, value, n}, seed, digest));
          }
        }
      }
    }
  }
  const std::uint64_t base_seed = cfg.seeds.front();
  if (cfg.include_existing && !existing.empty()) {
    const Placement p = fixed_placement(StrategyFamily::kExisting, existing, base_seed);
    for (const auto& r : ev.evaluate(p, nullptr, cfg.regressor)) {
      report.rows.push_back(make_row(cfg.city, nullptr, "existing", p.budget, "permanent", "", r,
                                     base_seed, digest));
    }
  }
  if (cfg.include_all_training) {
    const Placement p = fixed_placement(StrategyFamily::kAllTraining, train, base_seed);
    for (const auto& r : ev.evaluate(p, nullptr, cfg.regressor)) {
      report.rows.push_back(make_row(cfg.city, nullptr, "all_training", p.budget, "permanent", "",
                                     r, base_seed, digest));
    }
  }
  report.sort_rows();
  report.metadata = {{"config", cfg.to_json()},
                     {"config_digest", digest},
                     {"split", ev.split().to_json()},
                     {"random_mode", cfg.random_repetitions >= 1000 ? "full" : "fast"},
                     {"skipped_budgets", skipped},
                     {"boundary_inferred", ds.boundary_inferred},
                     {"test_pairs", ev.test_size()},
                     {"environment", environment_metadata()}};
  return report;
}

namespace {

std::size_t locations_needed(const Scheme& s, int days) {
  const auto d = static_cast<std::size_t>(days);
  if (s.family == SchemeFamily::kRotating) {
    const auto per = static_cast<std::size_t>(s.days_per_location);
    return (d + per - 1) / per;
  }
  return d;
}

}  // namespace

BenchmarkReport run_temporal_benchmark(const Evaluator& ev, const TemporalBenchmarkConfig& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorKind::kConfiguration, "temporal benchmark needs seeds");
  if (cfg.day_budgets.empty() || cfg.schemes.empty()) {
    throw Error(ErrorKind::kConfiguration, "temporal benchmark needs schemes and day budgets");
  }
  const Dataset& ds = ev.dataset();
  BenchmarkReport report;
  report.experiment = "temporal";
  const std::string digest = config_digest(
      {{"experiment", "temporal"}, {"config", cfg.to_json()}, {"split", ev.split().to_json()}});
  std::size_t needed = 1;
  for (int d : cfg.day_budgets) {
    if (d < 1) throw Error(ErrorKind::kConfiguration, "day budgets must be positive");
    for (const Scheme& s : cfg.schemes) needed = std::max(needed, locations_needed(s, d));
  }
  const int k = static_cast<int>(std::min(needed, ev.split().train.size()));
  PlacementInputs in = inputs_for(ev, cfg.active_learning, cfg.greedy_cells_per_side);
  json plan_errors = json::array();
  json substitutions = json::array();
  const std::string strategy = cfg.placement_strategy.label();
  for (std::uint64_t seed : cfg.seeds) {
    const Placement placement = placement_with_context(cfg.placement_strategy, in, k, {}, seed);
    for (int d : cfg.day_budgets) {
      const std::vector<Date> dates = sample_days(ds.calendar, d, seed);
      for (const Scheme& scheme : cfg.schemes) {
        try {
          const DeploymentPlan plan =
              allocate_plan(scheme, dates, placement.selected, ds.calendar, seed);
          if (!plan.substitutions.empty()) {
            substitutions.push_back({{"seed", seed},
                                     {"budget", d},
                                     {"scheme", scheme.label()},
                                     {"count", plan.substitutions.size()}});
          }
          for (const auto& r : ev.evaluate(placement, &plan, cfg.regressor)) {
            report.rows.push_back(make_row(cfg.city, &cfg.placement_strategy, strategy, d,
                                           "temporary", scheme.label(), r, seed, digest));
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kPlan && e.kind() != ErrorKind::kEvaluation) throw;
          plan_errors.push_back(
              {{"seed", seed}, {"budget", d}, {"scheme", scheme.label()}, {"error", e.what()}});
          for (Metric m : kDefaultMetrics) {
            report.rows.push_back(make_row(cfg.city, &cfg.placement_strategy, strategy, d,
                                           "temporary", scheme.label(), {m, kNaN, 0}, seed,
                                           digest));
          }
        }
      }
    }
  }
  report.sort_rows();
  report.metadata = {{"config", cfg.to_json()},
                     {"config_digest", digest},
                     {"split", ev.split().to_json()},
                     {"plan_errors", plan_errors},
                     {"substitutions", substitutions},
                     {"weekday_cyclic_assignment", true},
                     {"test_pairs", ev.test_size()},
                     {"environment", environment_metadata()}};
  return report;
}

std::optional<double> equivalent_sensor_count(double target,
                                              std::span<const std::pair<double, double>> curve) {
  if (curve.size() < 2) {
    throw Error(ErrorKind::kArity, "equivalent sensor count needs at least 2 curve points");
  }
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto [count, mae] = curve[i];
    if (mae == target) return count;
    if (mae < target) {
      if (i == 0) return count;
      const auto [c0, m0] = curve[i - 1];
      return c0 + (target - m0) * (count - c0) / (mae - m0);
    }
  }
  return std::nullopt;
}

BenchmarkReport compare_permanent_temporary(const Evaluator& ev, const ComparisonConfig& cfg) {
  if (cfg.seeds.empty()) throw Error(ErrorKind::kConfiguration, "comparison needs seeds");
  if (cfg.budgets.empty()) throw Error(ErrorKind::kConfiguration, "comparison needs budgets");
  const Dataset& ds = ev.dataset();
  const int n_train = static_cast<int>(ev.split().train.size());
  BenchmarkReport report;
  report.experiment = "compare";
  const std::string digest = config_digest(
      {{"experiment", "compare"}, {"config", cfg.to_json()}, {"split", ev.split().to_json()}});

  std::set<int> permanent;
  for (int k : cfg.budgets) {
    if (k < 1 || k > n_train) {
      throw Error(ErrorKind::kBudget, "comparison budget " + std::to_string(k) +
                                          " outside 1.." + std::to_string(n_train));
    }
    permanent.insert(k);
  }
  const int curve_max = cfg.curve_max > 0 ? std::min(cfg.curve_max, n_train) : n_train;
  std::set<int> temporary(permanent);
  for (int c = cfg.curve_step; c <= curve_max; c += cfg.curve_step) temporary.insert(c);
  const int k_max = *temporary.rbegin();

  PlacementInputs in = inputs_for(ev, cfg.active_learning, cfg.greedy_cells_per_side);
  const std::string strategy = cfg.strategy.label();
  json equivalents = json::array();
  json plan_errors = json::array();
  json paired = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    const Placement full = placement_with_context(cfg.strategy, in, k_max, {}, seed);
    std::map<int, double> perm_mae;
    std::vector<std::pair<double, double>> curve;
    for (int k : permanent) {
      paired.push_back({{"seed", seed}, {"budget", k}, {"segments", full.truncated(k).selected}});
      for (const auto& r : ev.evaluate(full.truncated(k), nullptr, cfg.regressor)) {
        if (r.metric == Metric::kMae) perm_mae[k] = r.value;
        report.rows.push_back(
            make_row(cfg.city, &cfg.strategy, strategy, k, "permanent", "", r, seed, digest));
      }
    }
    for (int k : temporary) {
      const Placement p = full.truncated(k);
      try {
        const auto dates = sample_days(ds.calendar, k, seed);
        const DeploymentPlan plan = allocate_plan(cfg.scheme, dates, p.selected, ds.calendar, seed);
        for (const auto& r : ev.evaluate(p, &plan, cfg.regressor)) {
          if (r.metric == Metric::kMae) curve.emplace_back(k, r.value);
          report.rows.push_back(make_row(cfg.city, &cfg.strategy, strategy, k, "temporary",
                                         cfg.scheme.label(), r, seed, digest));
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kPlan && e.kind() != ErrorKind::kEvaluation) throw;
        plan_errors.push_back({{"seed", seed}, {"budget", k}, {"error", e.what()}});
      }
    }
    for (const auto& [k, mae] : perm_mae) {
      json entry = {{"seed", seed}, {"budget", k}, {"permanent_mae", mae}};
      std::optional<double> eq;
      if (curve.size() >= 2) eq = equivalent_sensor_count(mae, curve);
      entry["equivalent_observations"] = eq ? json(*eq) : json("unattainable");
      equivalents.push_back(std::move(entry));
    }
  }
  report.sort_rows();
  report.metadata = {{"config", cfg.to_json()},
                     {"config_digest", digest},
                     {"split", ev.split().to_json()},
                     {"equivalent_counts", equivalents},
                     {"paired_locations", paired},
                     {"plan_errors", plan_errors},
                     {"test_pairs", ev.test_size()},
                     {"environment", environment_metadata()}};
  return report;
}

// ---------------------------------------------------------------------------
// SVG plots

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_chart(const std::string& title, const std::string& y_label,
                         const std::map<std::string, std::map<int, double>>& series) {
  constexpr double kW = 720, kH = 440, kLeft = 70, kRight = 220, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& [name, pts] : series) {
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, static_cast<double>(x));
      x1 = std::max(x1, static_cast<double>(x));
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  y0 = std::min(0.0, y0);
  if (y1 == y0) y1 = y0 + 1;
  y1 *= 1.05;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                             "#bcbd22", "#17becf"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape_xml(title) << "</text>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
    << kTop + ph << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    s << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + ph + 18)
      << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    s << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(yv) + 4)
      << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    s << "<line x1=\"" << kLeft << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
  }
  s << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << kH - 10
    << "\" text-anchor=\"middle\">budget</text>\n";
  s << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" transform=\"rotate(-90 16 "
    << fmt(kTop + ph / 2) << ")\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";
  std::size_t i = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kPalette[i % std::size(kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [x, y] : pts) {
      s << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(py(y));
      first = false;
    }
    s << "\"/>\n";
    for (const auto& [x, y] : pts) {
      s << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(i);
    s << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << fmt(ly) << "\" x2=\""
      << kLeft + pw + 30 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << kLeft + pw + 34 << "\" y=\"" << fmt(ly + 4) << "\">" << escape_xml(name)
      << "</text>\n";
    ++i;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::vector<std::filesystem::path> write_plots(const BenchmarkReport& report,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::map<std::string, std::map<int, std::pair<double, int>>>> acc;
  for (const ReportRow& r : report.rows) {
    if (!std::isfinite(r.value)) continue;
    std::string name = r.strategy;
    if (!r.scheme.empty()) name += " " + r.scheme;
    if (report.experiment == "compare") name += " (" + r.deployment + ")";
    auto& cell = acc[r.metric][name][r.budget];
    cell.first += r.value;
    cell.second += 1;
  }
  const std::string experiment = report.experiment.empty() ? "report" : report.experiment;
  std::vector<std::filesystem::path> written;
  for (const auto& [metric, by_series] : acc) {
    std::map<std::string, std::map<int, double>> series;
    for (const auto& [name, pts] : by_series) {
      for (const auto& [x, sum_count] : pts) {
        series[name][x] = sum_count.first / sum_count.second;
      }
    }
    const auto path = dir / (experiment + "_" + metric + ".svg");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kBundle, "cannot write " + path.string());
    out << render_chart(experiment + " benchmark: " + metric + " vs budget (mean over seeds)",
                        metric, series);
    written.push_back(path);
  }
  return written;
}

}  // namespace sensorplace
