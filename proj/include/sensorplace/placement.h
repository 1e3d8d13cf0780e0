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

// Sensor placement under a budget: centrality ranking, greedy objectives,
// uniform random draws and ensemble-variance active learning.

#ifndef SENSORPLACE_PLACEMENT_H_
#define SENSORPLACE_PLACEMENT_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sensorplace/common.h"
#include "sensorplace/dataset.h"
#include "sensorplace/feature_space.h"
#include "sensorplace/interpolator.h"
#include "sensorplace/model_features.h"
#include "sensorplace/network_graph.h"
#include "sensorplace/spatial_metrics.h"

namespace sensorplace {

enum class StrategyFamily {
  kBetweenness,
  kCloseness,
  kFeatureDiversity,
  kFeatureRedundancy,
  kFeatureCoverage,
  kDispersion,
  kVoronoiGini,
  kActiveLearning,
  kRandom,
  // Baselines that are not produced by a placement rule.
  kExisting,
  kAllTraining,
};

enum class Direction { kMaximize, kMinimize };

std::string_view to_string(StrategyFamily family);

struct StrategyDescriptor {
  StrategyFamily family = StrategyFamily::kDispersion;
  FeatureSubsetSpec feature_subset;  // feature families only

  bool uses_features() const;
  Direction direction() const;  // redundancy and voronoi_gini minimize
  std::string name() const { return std::string(to_string(family)); }
  // "<family>" or "<family>[<subset>]" for feature families.
  std::string label() const;

  // Accepts "<family>" and "<family>[<subset>]"; `subset` overrides the
  // bracket form. Throws kConfiguration naming the unknown strategy.
  static StrategyDescriptor parse(std::string_view text,
                                  std::optional<std::string_view> subset = std::nullopt);

  friend bool operator==(const StrategyDescriptor&, const StrategyDescriptor&) = default;
};

struct Placement {
  std::vector<SegmentId> selected;  // selection order
  StrategyDescriptor strategy;
  int budget = 0;
  std::uint64_t seed = 0;
  std::vector<SegmentId> initial;  // prefix of selected
  // Objective after each selection, aligned with `selected`; NaN where the
  // step was not an optimization step or the objective is undefined.
  std::vector<double> step_objectives;
  // voronoi_gini only: Gini of the final configuration at full resolution.
  std::optional<double> final_objective;

  // Throws kBudget / kConfiguration when an invariant fails.
  void validate(std::span<const SegmentId> candidates) const;
  // The first k selections; greedy, ranked and active-learning placements
  // are prefix-consistent, so this equals a fresh run at budget k.
  Placement truncated(int k) const;

  nlohmann::json to_json() const;
  static Placement from_json(const nlohmann::json& doc);
};

// Initial ids first, then remaining candidates by descending score (ties to
// the lowest id). Throws kBudget when K < |initial| or K > |candidates|.
Placement rank_place(const CentralityScores& scores,
                     std::span<const SegmentId> candidates, int budget,
                     std::span<const SegmentId> initial = {});

enum class GreedyObjective { kDiversity, kRedundancy, kCoverage, kDispersion, kVoronoiGini };

std::string_view to_string(GreedyObjective objective);
Direction direction_of(GreedyObjective objective);

struct GreedyContext {
  std::vector<SegmentId> candidates;  // ascending
  std::optional<Matrix> features;     // rows aligned with candidates
  std::vector<Point2> midpoints;      // aligned with candidates; may be empty
  std::optional<StudyArea> area;
  double greedy_cells_per_side = 200.0;
  Execution execution = Execution::kParallel;
};

// Adds one candidate per step, optimizing the objective of the enlarged set;
// ties go to the lowest id. With no initial ids the first pick is uniform
// from the candidates under `seed`. Throws kConfiguration when the context
// lacks what the objective needs.
Placement greedy_place(GreedyObjective objective, const GreedyContext& context,
                       int budget, std::span<const SegmentId> initial,
                       std::uint64_t seed);

// Objective of the set given by candidate positions, computed from scratch
// (voronoi_gini on the greedy-resolution raster). Used to audit greedy steps.
double greedy_objective_value(GreedyObjective objective, const GreedyContext& context,
                              std::span<const std::size_t> members);

// R independent uniform draws of K distinct candidates; draw r uses seed + r.
std::vector<Placement> random_placements(std::span<const SegmentId> candidates,
                                         int budget, int repetitions,
                                         std::uint64_t seed);

struct ActiveLearningConfig {
  int members = 10;
  int time_subsample = 30;
  bool full_average = false;  // average over every time step instead
  RegressorConfig regressor;

  nlohmann::json to_json() const;
  static ActiveLearningConfig from_json(const nlohmann::json& doc);
};

// Each step fits a bootstrap ensemble on all observations of the current
// selection and adds the candidate with the largest mean predictive variance
// over a seeded subsample of time steps shared by all candidates.
// `trainer` replaces the boosted-tree members when given.
Placement active_learning_place(const ModelFeatures& features,
                                std::span<const SegmentId> candidates, int budget,
                                std::span<const SegmentId> initial,
                                const ActiveLearningConfig& config, std::uint64_t seed,
                                const RegressorTrainer* trainer = nullptr);

struct PlacementInputs {
  const Dataset* dataset = nullptr;
  const ModelFeatures* features = nullptr;  // active learning only
  std::vector<SegmentId> candidates;        // training segments
  ActiveLearningConfig active_learning;
  double greedy_cells_per_side = 200.0;
  Execution execution = Execution::kParallel;
  // Optional precomputed scores over the whole graph.
  std::shared_ptr<const CentralityScores> betweenness;
  std::shared_ptr<const CentralityScores> closeness;
};

// Dispatches on the strategy family. Random uses one draw with `seed`.
Placement place(const StrategyDescriptor& strategy, const PlacementInputs& inputs,
                int budget, std::span<const SegmentId> initial, std::uint64_t seed);

}  // namespace sensorplace

#endif  // SENSORPLACE_PLACEMENT_H_
