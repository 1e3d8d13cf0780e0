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

// Error metrics, placement evaluation and the three experiment families:
// spatial strategy tables, temporal scheme curves and permanent versus
// temporary comparisons.

#ifndef SENSORPLACE_BENCH_H_
#define SENSORPLACE_BENCH_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sensorplace/dataset.h"
#include "sensorplace/interpolator.h"
#include "sensorplace/model_features.h"
#include "sensorplace/placement.h"
#include "sensorplace/temporal.h"

namespace sensorplace {

enum class Metric { kMae, kRmse };

std::string_view to_string(Metric metric);  // "MAE", "RMSE"
Metric parse_metric(std::string_view text);

struct EvaluationResult {
  Metric metric = Metric::kMae;
  double value = 0.0;
  std::size_t n = 0;
};

// Throws kShape on length mismatch and kArity on empty input.
EvaluationResult compute_error(std::span<const double> truth,
                               std::span<const double> predicted, Metric metric);

inline constexpr Metric kDefaultMetrics[] = {Metric::kMae, Metric::kRmse};

// Fixed test set of one split: every observation of every test segment.
// Encoders are fitted on the training segments.
class Evaluator {
 public:
  Evaluator(const Dataset& dataset, SplitAssignment split);

  const Dataset& dataset() const { return *dataset_; }
  const SplitAssignment& split() const { return split_; }
  const ModelFeatures& features() const { return *features_; }
  std::size_t test_size() const { return test_targets_.size(); }

  // Permanent deployment when `plan` is null. Throws kEvaluation when the
  // placement leaves the training set or yields no training rows.
  std::vector<EvaluationResult> evaluate(
      const Placement& placement, const DeploymentPlan* plan,
      const RegressorConfig& config,
      std::span<const Metric> metrics = kDefaultMetrics,
      const RegressorTrainer* trainer = nullptr) const;

  std::vector<EvaluationResult> evaluate_rows(
      const TrainingRows& rows, const RegressorConfig& config,
      std::span<const Metric> metrics = kDefaultMetrics,
      const RegressorTrainer* trainer = nullptr) const;

 private:
  const Dataset* dataset_;
  SplitAssignment split_;
  std::unique_ptr<ModelFeatures> features_;
  Matrix test_rows_;
  std::vector<double> test_targets_;
};

std::vector<EvaluationResult> evaluate_placement(
    const Dataset& dataset, const SplitAssignment& split, const Placement& placement,
    const DeploymentPlan* plan, const RegressorConfig& config,
    std::span<const Metric> metrics = kDefaultMetrics);

struct ReportRow {
  std::string city;
  std::string strategy;
  std::string feature_subset;
  int budget = 0;
  std::string deployment;  // permanent | temporary
  std::string scheme;
  std::string metric;
  double value = 0.0;  // NaN for failed rows
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string config_digest;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct BenchmarkReport {
  std::string experiment;  // spatial | temporal | compare
  std::vector<ReportRow> rows;
  nlohmann::json metadata = nlohmann::json::object();

  // Orders rows by (strategy, budget, metric), keeping generation order
  // among equal keys.
  void sort_rows();
  std::string to_csv() const;
  static BenchmarkReport from_csv(const std::filesystem::path& path);
  // report.csv and report.json in `dir`.
  void write(const std::filesystem::path& dir) const;
};

// FNV-1a 64 over `doc.dump()` as 16 hex digits.
std::string config_digest(const nlohmann::json& doc);

struct SpatialBenchmarkConfig {
  std::string city = "city";
  std::vector<int> budgets = {10, 25, 50, 75, 100};
  std::vector<StrategyDescriptor> strategies;
  std::vector<std::uint64_t> seeds;
  int random_repetitions = 1000;  // 100 in fast mode
  bool include_random = true;
  bool include_existing = true;
  bool include_all_training = true;
  bool extend_existing = false;  // existing sensors seed every placement
  RegressorConfig regressor;
  ActiveLearningConfig active_learning;
  double greedy_cells_per_side = 200.0;

  nlohmann::json to_json() const;
  static SpatialBenchmarkConfig from_json(const nlohmann::json& doc);
};

BenchmarkReport run_spatial_benchmark(const Evaluator& evaluator,
                                      const SpatialBenchmarkConfig& config);

struct TemporalBenchmarkConfig {
  std::string city = "city";
  std::vector<Scheme> schemes = {Scheme::rotating(1), Scheme::rotating(2), Scheme::rotating(5),
                                 Scheme::rotating(10)};
  std::vector<int> day_budgets;
  StrategyDescriptor placement_strategy;
  std::vector<std::uint64_t> seeds;
  RegressorConfig regressor;
  ActiveLearningConfig active_learning;
  double greedy_cells_per_side = 200.0;

  nlohmann::json to_json() const;
  static TemporalBenchmarkConfig from_json(const nlohmann::json& doc);
};

// For each (seed, D): one date sample shared by every scheme, locations from
// the placement strategy in selection order.
BenchmarkReport run_temporal_benchmark(const Evaluator& evaluator,
                                       const TemporalBenchmarkConfig& config);

struct ComparisonConfig {
  std::string city = "city";
  StrategyDescriptor strategy;
  std::vector<int> budgets;
  std::vector<std::uint64_t> seeds;
  int curve_step = 50;  // temporary curve grid in observations
  int curve_max = 0;    // 0: up to |train|
  Scheme scheme = Scheme::on_weekday(std::nullopt);
  RegressorConfig regressor;
  ActiveLearningConfig active_learning;
  double greedy_cells_per_side = 200.0;

  nlohmann::json to_json() const;
  static ComparisonConfig from_json(const nlohmann::json& doc);
};

// Paired permanent / temporary rows on identical location lists, plus the
// temporary curve on the observation grid. The metadata carries the
// equivalent counts and each shared location list.
BenchmarkReport compare_permanent_temporary(const Evaluator& evaluator,
                                            const ComparisonConfig& config);

// Smallest observation count at which the piecewise-linear temporary curve
// reaches `target_mae`; nullopt when it never does. Throws kArity for fewer
// than 2 points.
std::optional<double> equivalent_sensor_count(
    double target_mae, std::span<const std::pair<double, double>> curve);

// One line chart per metric: <experiment>_<metric>.svg in `dir`. Returns the
// written paths.
std::vector<std::filesystem::path> write_plots(const BenchmarkReport& report,
                                               const std::filesystem::path& dir);

}  // namespace sensorplace

#endif  // SENSORPLACE_BENCH_H_
