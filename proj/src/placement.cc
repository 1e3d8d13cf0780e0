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

#include "sensorplace/placement.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

namespace sensorplace {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FamilyName {
  StrategyFamily family;
  std::string_view name;
};

constexpr std::array<FamilyName, 11> kFamilies = {{
    {StrategyFamily::kBetweenness, "betweenness"},
    {StrategyFamily::kCloseness, "closeness"},
    {StrategyFamily::kFeatureDiversity, "feature_diversity"},
    {StrategyFamily::kFeatureRedundancy, "feature_redundancy"},
    {StrategyFamily::kFeatureCoverage, "feature_coverage"},
    {StrategyFamily::kDispersion, "dispersion"},
    {StrategyFamily::kVoronoiGini, "voronoi_gini"},
    {StrategyFamily::kActiveLearning, "active_learning"},
    {StrategyFamily::kRandom, "random"},
    {StrategyFamily::kExisting, "existing"},
    {StrategyFamily::kAllTraining, "all_training"},
}};

void check_budget(int budget, std::size_t n_initial, std::size_t n_candidates) {
  if (budget < 1) throw Error(ErrorKind::kBudget, "budget must be positive");
  if (static_cast<std::size_t>(budget) < n_initial) {
    throw Error(ErrorKind::kBudget, "budget " + std::to_string(budget) +
                                        " is smaller than the " + std::to_string(n_initial) +
                                        " initial sensors");
  }
  if (static_cast<std::size_t>(budget) > n_candidates) {
    throw Error(ErrorKind::kBudget, "budget " + std::to_string(budget) + " exceeds the " +
                                        std::to_string(n_candidates) + " candidates");
  }
}

// Positions of `ids` within the ascending `candidates`; throws kConfiguration
// for ids that are not candidates or repeat.
std::vector<std::size_t> positions_of(std::span<const SegmentId> candidates,
                                      std::span<const SegmentId> ids) {
  std::vector<std::size_t> out;
  std::set<SegmentId> seen;
  for (SegmentId id : ids) {
    auto it = std::lower_bound(candidates.begin(), candidates.end(), id);
    if (it == candidates.end() || *it != id) {
      throw Error(ErrorKind::kConfiguration,
                  "initial sensor " + std::to_string(id) + " is not a candidate segment");
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::kConfiguration, "initial sensor " + std::to_string(id) + " repeats");
    }
    out.push_back(static_cast<std::size_t>(it - candidates.begin()));
  }
  return out;
}

std::vector<SegmentId> sorted_unique(std::span<const SegmentId> ids) {
  std::vector<SegmentId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorKind::kConfiguration, "candidate segments repeat");
  }
  return out;
}

// Position of the best finite score; strict comparison keeps the lowest
// position on ties.
std::optional<std::size_t> best_position(std::span<const double> scores, Direction direction) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) continue;
    if (!best || (direction == Direction::kMaximize ? scores[i] > scores[*best]
                                                    : scores[i] < scores[*best])) {
      best = i;
    }
  }
  return best;
}

double gini_of_counts(std::span<const long long> counts) {
  std::vector<double> areas(counts.begin(), counts.end());
  return gini(areas);
}

}  // namespace

std::string_view to_string(StrategyFamily family) {
  for (const auto& f : kFamilies) {
    if (f.family == family) return f.name;
  }
  return "unknown";
}

bool StrategyDescriptor::uses_features() const {
  return family == StrategyFamily::kFeatureDiversity ||
         family == StrategyFamily::kFeatureRedundancy ||
         family == StrategyFamily::kFeatureCoverage;
}

Direction StrategyDescriptor::direction() const {
  return family == StrategyFamily::kFeatureRedundancy || family == StrategyFamily::kVoronoiGini
             ? Direction::kMinimize
             : Direction::kMaximize;
}

std::string StrategyDescriptor::label() const {
  if (!uses_features()) return name();
  return name() + "[" + feature_subset.label() + "]";
}

StrategyDescriptor StrategyDescriptor::parse(std::string_view text,
                                             std::optional<std::string_view> subset) {
  std::string_view family = text;
  std::optional<std::string_view> bracket;
  if (const auto open = text.find('['); open != std::string_view::npos) {
    if (text.back() != ']') {
      throw Error(ErrorKind::kConfiguration, "unknown strategy '" + std::string(text) + "'");
    }
    family = text.substr(0, open);
    bracket = text.substr(open + 1, text.size() - open - 2);
  }
  StrategyDescriptor d;
  bool found = false;
  for (const auto& f : kFamilies) {
    if (f.name == family) {
      d.family = f.family;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kConfiguration, "unknown strategy '" + std::string(text) + "'");
  }
  if (subset) bracket = subset;
  if (bracket && !bracket->empty()) {
    if (!d.uses_features()) {
      throw Error(ErrorKind::kConfiguration,
                  "strategy '" + std::string(family) + "' takes no feature subset");
    }
    d.feature_subset = FeatureSubsetSpec::parse(*bracket);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Placement

void Placement::validate(std::span<const SegmentId> candidates) const {
  if (budget < 1 || selected.size() != static_cast<std::size_t>(budget)) {
    throw Error(ErrorKind::kBudget, "placement holds " + std::to_string(selected.size()) +
                                        " sensors for budget " + std::to_string(budget));
  }
  std::vector<SegmentId> sorted(selected);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::kConfiguration, "placement repeats a segment");
  }
  if (!candidates.empty()) {
    std::vector<SegmentId> cand(candidates.begin(), candidates.end());
    std::sort(cand.begin(), cand.end());
    for (SegmentId id : selected) {
      if (!std::binary_search(cand.begin(), cand.end(), id)) {
        throw Error(ErrorKind::kConfiguration,
                    "placement segment " + std::to_string(id) + " is not a training segment");
      }
    }
  }
  if (initial.size() > selected.size() ||
      !std::equal(initial.begin(), initial.end(), selected.begin())) {
    throw Error(ErrorKind::kConfiguration, "initial sensors are not a prefix of the placement");
  }
}

Placement Placement::truncated(int k) const {
  if (k < static_cast<int>(initial.size()) || k > static_cast<int>(selected.size()) || k < 1) {
    throw Error(ErrorKind::kBudget, "cannot truncate a placement of " +
                                        std::to_string(selected.size()) + " to " +
                                        std::to_string(k));
  }
  Placement p = *this;
  p.budget = k;
  p.selected.resize(static_cast<std::size_t>(k));
  if (p.step_objectives.size() > static_cast<std::size_t>(k)) {
    p.step_objectives.resize(static_cast<std::size_t>(k));
  }
  if (k != static_cast<int>(selected.size())) p.final_objective.reset();
  return p;
}

json Placement::to_json() const {
  json steps = json::array();
  for (double v : step_objectives) {
    steps.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  }
  json doc = {{"format", "sensorplace.placement"},
              {"version", 1},
              {"strategy", strategy.label()},
              {"family", strategy.name()},
              {"direction", strategy.direction() == Direction::kMaximize ? "maximize" : "minimize"},
              {"budget", budget},
              {"seed", seed},
              {"initial", initial},
              {"selected", selected},
              {"step_objectives", std::move(steps)}};
  if (strategy.uses_features()) doc["feature_subset"] = strategy.feature_subset.label();
  if (final_objective) doc["final_objective"] = *final_objective;
  return doc;
}

Placement Placement::from_json(const json& doc) {
  try {
    Placement p;
    p.strategy = StrategyDescriptor::parse(doc.at("strategy").get<std::string>());
    p.budget = doc.at("budget").get<int>();
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.initial = doc.value("initial", std::vector<SegmentId>{});
    p.selected = doc.at("selected").get<std::vector<SegmentId>>();
    if (doc.contains("step_objectives")) {
      for (const json& v : doc.at("step_objectives")) {
        p.step_objectives.push_back(v.is_null() ? kNaN : v.get<double>());
      }
    }
    if (doc.contains("final_objective")) p.final_objective = doc.at("final_objective").get<double>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "malformed placement document: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// Ranking

Placement rank_place(const CentralityScores& scores, std::span<const SegmentId> candidates,
                     int budget, std::span<const SegmentId> initial) {
  const auto cand = sorted_unique(candidates);
  check_budget(budget, initial.size(), cand.size());
  positions_of(cand, initial);
  Placement p;
  p.strategy.family = scores.kind == CentralityKind::kBetweenness ? StrategyFamily::kBetweenness
                                                                  : StrategyFamily::kCloseness;
  p.budget = budget;
  p.initial.assign(initial.begin(), initial.end());
  p.selected = p.initial;
  p.step_objectives.assign(initial.size(), kNaN);
  std::set<SegmentId> taken(initial.begin(), initial.end());
  std::vector<std::pair<double, SegmentId>> ranked;
  for (SegmentId id : cand) {
    if (!taken.count(id)) ranked.emplace_back(scores.at(id), id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto& [score, id] : ranked) {
    if (p.selected.size() == static_cast<std::size_t>(budget)) break;
    p.selected.push_back(id);
    p.step_objectives.push_back(score);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Greedy

std::string_view to_string(GreedyObjective objective) {
  switch (objective) {
    case GreedyObjective::kDiversity: return "diversity";
    case GreedyObjective::kRedundancy: return "redundancy";
    case GreedyObjective::kCoverage: return "coverage";
    case GreedyObjective::kDispersion: return "dispersion";
    case GreedyObjective::kVoronoiGini: return "voronoi_gini";
  }
  return "unknown";
}

Direction direction_of(GreedyObjective objective) {
  return objective == GreedyObjective::kRedundancy || objective == GreedyObjective::kVoronoiGini
             ? Direction::kMinimize
             : Direction::kMaximize;
}

namespace {

StrategyFamily family_of(GreedyObjective objective) {
  switch (objective) {
    case GreedyObjective::kDiversity: return StrategyFamily::kFeatureDiversity;
    case GreedyObjective::kRedundancy: return StrategyFamily::kFeatureRedundancy;
    case GreedyObjective::kCoverage: return StrategyFamily::kFeatureCoverage;
    case GreedyObjective::kDispersion: return StrategyFamily::kDispersion;
    case GreedyObjective::kVoronoiGini: return StrategyFamily::kVoronoiGini;
  }
  return StrategyFamily::kDispersion;
}

void check_context(GreedyObjective objective, const GreedyContext& ctx) {
  const std::size_t n = ctx.candidates.size();
  switch (objective) {
    case GreedyObjective::kDiversity:
    case GreedyObjective::kRedundancy:
    case GreedyObjective::kCoverage:
      if (!ctx.features || ctx.features->rows() != n) {
        throw Error(ErrorKind::kConfiguration, std::string(to_string(objective)) +
                                                   " needs one feature row per candidate");
      }
      if (ctx.features->cols() == 0) {
        throw Error(ErrorKind::kConfiguration, "feature vectors are empty");
      }
      break;
    case GreedyObjective::kVoronoiGini:
      if (!ctx.area) {
        throw Error(ErrorKind::kConfiguration, "voronoi_gini needs a study area");
      }
      [[fallthrough]];
    case GreedyObjective::kDispersion:
      if (ctx.midpoints.size() != n) {
        throw Error(ErrorKind::kConfiguration, std::string(to_string(objective)) +
                                                   " needs one midpoint per candidate");
      }
      break;
  }
  if (!std::is_sorted(ctx.candidates.begin(), ctx.candidates.end()) ||
      std::adjacent_find(ctx.candidates.begin(), ctx.candidates.end()) != ctx.candidates.end()) {
    throw Error(ErrorKind::kConfiguration, "greedy candidates must be ascending and unique");
  }
}

// Incremental objective state over the current selection. score() is the
// objective of selection + {c} and is safe to call concurrently.
class GreedyState {
 public:
  GreedyState(GreedyObjective objective, const GreedyContext& ctx)
      : objective_(objective), ctx_(ctx), n_(ctx.candidates.size()) {
    switch (objective_) {
      case GreedyObjective::kDiversity:
      case GreedyObjective::kRedundancy:
        pair_gain_.assign(n_, 0.0);
        if (objective_ == GreedyObjective::kRedundancy) {
          norms_.resize(n_);
          for (std::size_t c = 0; c < n_; ++c) {
            double s = 0.0;
            for (double v : ctx_.features->row(c)) s += v * v;
            norms_[c] = std::sqrt(s);
            if (norms_[c] == 0.0) {
              throw Error(ErrorKind::kUndefined,
                          "cosine similarity is undefined for the all-zero feature vector of "
                          "segment " + std::to_string(ctx_.candidates[c]));
            }
          }
        }
        break;
      case GreedyObjective::kCoverage:
        sum_.assign(ctx_.features->cols(), 0.0);
        sumsq_.assign(ctx_.features->cols(), 0.0);
        break;
      case GreedyObjective::kDispersion:
        break;
      case GreedyObjective::kVoronoiGini: {
        grid_ = std::make_unique<RasterGrid>(
            *ctx_.area, default_resolution(*ctx_.area, ctx_.greedy_cells_per_side));
        if (grid_->cells().empty()) {
          throw Error(ErrorKind::kConfiguration, "greedy raster has no cells inside the area");
        }
        owner_.assign(grid_->cells().size(), -1);
        dist2_.assign(grid_->cells().size(), std::numeric_limits<double>::infinity());
        break;
      }
    }
  }

  std::size_t size() const { return members_.size(); }

  double score(std::size_t c) const {
    const double m = static_cast<double>(members_.size());
    switch (objective_) {
      case GreedyObjective::kDiversity:
      case GreedyObjective::kRedundancy: {
        if (members_.empty()) return kNaN;
        const double pairs = m * (m + 1.0) / 2.0;
        return (pair_total_ + pair_gain_[c]) / pairs;
      }
      case GreedyObjective::kCoverage: {
        const auto x = ctx_.features->row(c);
        double total = 0.0;
        for (std::size_t p = 0; p < x.size(); ++p) {
          const double mean = (sum_[p] + x[p]) / (m + 1.0);
          const double var = (sumsq_[p] + x[p] * x[p]) / (m + 1.0) - mean * mean;
          total += std::max(0.0, var);
        }
        return total / static_cast<double>(x.size());
      }
      case GreedyObjective::kDispersion: {
        if (members_.empty()) return kNaN;
        const Point2 pc = ctx_.midpoints[c];
        double own = std::numeric_limits<double>::infinity();
        double total = 0.0;
        for (std::size_t k = 0; k < members_.size(); ++k) {
          const double d = std::sqrt(squared_distance(pc, ctx_.midpoints[members_[k]]));
          own = std::min(own, d);
          total += std::min(nn_[k], d);
        }
        return (total + own) / (m + 1.0);
      }
      case GreedyObjective::kVoronoiGini: {
        std::vector<long long> counts(counts_);
        long long mine = 0;
        const Point2 pc = ctx_.midpoints[c];
        const SegmentId id = ctx_.candidates[c];
        const auto cells = grid_->cells();
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const double d2 = squared_distance(cells[i], pc);
          const int o = owner_[i];
          if (o < 0 || d2 < dist2_[i] ||
              (d2 == dist2_[i] && id < ctx_.candidates[members_[static_cast<std::size_t>(o)]])) {
            if (o >= 0) --counts[static_cast<std::size_t>(o)];
            ++mine;
          }
        }
        counts.push_back(mine);
        return gini_of_counts(counts);
      }
    }
    return kNaN;
  }

  void add(std::size_t c) {
    switch (objective_) {
      case GreedyObjective::kDiversity:
      case GreedyObjective::kRedundancy: {
        pair_total_ += pair_gain_[c];
        const auto xc = ctx_.features->row(c);
        for (std::size_t u = 0; u < n_; ++u) {
          const auto xu = ctx_.features->row(u);
          if (objective_ == GreedyObjective::kDiversity) {
            pair_gain_[u] += euclidean_distance(xu, xc);
          } else {
            double dot = 0.0;
            for (std::size_t p = 0; p < xu.size(); ++p) dot += xu[p] * xc[p];
            pair_gain_[u] += dot / (norms_[u] * norms_[c]);
          }
        }
        break;
      }
      case GreedyObjective::kCoverage: {
        const auto x = ctx_.features->row(c);
        for (std::size_t p = 0; p < x.size(); ++p) {
          sum_[p] += x[p];
          sumsq_[p] += x[p] * x[p];
        }
        break;
      }
      case GreedyObjective::kDispersion: {
        const Point2 pc = ctx_.midpoints[c];
        double own = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < members_.size(); ++k) {
          const double d = std::sqrt(squared_distance(pc, ctx_.midpoints[members_[k]]));
          own = std::min(own, d);
          nn_[k] = std::min(nn_[k], d);
        }
        nn_.push_back(own);
        break;
      }
      case GreedyObjective::kVoronoiGini: {
        const Point2 pc = ctx_.midpoints[c];
        const SegmentId id = ctx_.candidates[c];
        const int slot = static_cast<int>(members_.size());
        long long mine = 0;
        const auto cells = grid_->cells();
        for (std::size_t i = 0; i < cells.size(); ++i) {
          const double d2 = squared_distance(cells[i], pc);
          const int o = owner_[i];
          if (o < 0 || d2 < dist2_[i] ||
              (d2 == dist2_[i] && id < ctx_.candidates[members_[static_cast<std::size_t>(o)]])) {
            if (o >= 0) --counts_[static_cast<std::size_t>(o)];
            owner_[i] = slot;
            dist2_[i] = d2;
            ++mine;
          }
        }
        counts_.push_back(mine);
        break;
      }
    }
    members_.push_back(c);
  }

 private:
  GreedyObjective objective_;
  const GreedyContext& ctx_;
  std::size_t n_;
  std::vector<std::size_t> members_;
  // diversity / redundancy
  std::vector<double> pair_gain_;  // sum over members of the pair term with u
  std::vector<double> norms_;
  double pair_total_ = 0.0;
  // coverage
  std::vector<double> sum_;
  std::vector<double> sumsq_;
  // dispersion: nearest-neighbor distance of each member
  std::vector<double> nn_;
  // voronoi_gini
  std::unique_ptr<RasterGrid> grid_;
  std::vector<int> owner_;  // member slot per cell, -1 before the first member
  std::vector<double> dist2_;
  std::vector<long long> counts_;
};

}  // namespace

Placement greedy_place(GreedyObjective objective, const GreedyContext& ctx, int budget,
                       std::span<const SegmentId> initial, std::uint64_t seed) {
  check_context(objective, ctx);
  const std::size_t n = ctx.candidates.size();
  check_budget(budget, initial.size(), n);
  const auto init_pos = positions_of(ctx.candidates, initial);

  Placement p;
  p.strategy.family = family_of(objective);
  p.budget = budget;
  p.seed = seed;
  p.initial.assign(initial.begin(), initial.end());

  GreedyState state(objective, ctx);
  std::vector<char> taken(n, 0);
  auto take = [&](std::size_t c, double objective_value) {
    state.add(c);
    taken[c] = 1;
    p.selected.push_back(ctx.candidates[c]);
    p.step_objectives.push_back(objective_value);
  };
  for (std::size_t c : init_pos) take(c, kNaN);
  if (p.selected.empty()) {
    Rng rng(seed);
    take(uniform_index(rng, n), kNaN);
  }

  const Direction direction = direction_of(objective);
  const bool parallel = ctx.execution == Execution::kParallel;
  std::vector<double> scores(n);
  while (p.selected.size() < static_cast<std::size_t>(budget)) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      scores[cu] = taken[cu] ? kNaN : state.score(cu);
    }
    const auto best = best_position(scores, direction);
    if (!best) throw Error(ErrorKind::kBudget, "no candidate left to add");
    take(*best, scores[*best]);
  }

  if (objective == GreedyObjective::kVoronoiGini && p.selected.size() >= 1) {
    std::vector<Site> sites;
    for (SegmentId id : p.selected) {
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(ctx.candidates.begin(), ctx.candidates.end(), id) -
          ctx.candidates.begin());
      sites.push_back({id, ctx.midpoints[pos]});
    }
    p.final_objective = gini(voronoi_areas(sites, *ctx.area).areas);
  }
  return p;
}

double greedy_objective_value(GreedyObjective objective, const GreedyContext& ctx,
                              std::span<const std::size_t> members) {
  check_context(objective, ctx);
  switch (objective) {
    case GreedyObjective::kDiversity:
    case GreedyObjective::kRedundancy:
    case GreedyObjective::kCoverage: {
      const Matrix rows = select_rows(*ctx.features, members);
      const FeatureObjective kind = objective == GreedyObjective::kDiversity
                                        ? FeatureObjective::kDiversity
                                        : objective == GreedyObjective::kRedundancy
                                              ? FeatureObjective::kRedundancy
                                              : FeatureObjective::kCoverage;
      return score_feature_objective(rows, kind);
    }
    case GreedyObjective::kDispersion: {
      std::vector<Point2> pts;
      for (std::size_t m : members) pts.push_back(ctx.midpoints[m]);
      return mean_nearest_neighbor_distance(pts);
    }
    case GreedyObjective::kVoronoiGini: {
      std::vector<Site> sites;
      for (std::size_t m : members) sites.push_back({ctx.candidates[m], ctx.midpoints[m]});
      std::sort(sites.begin(), sites.end(),
                [](const Site& a, const Site& b) { return a.id < b.id; });
      const RasterGrid grid(*ctx.area, default_resolution(*ctx.area, ctx.greedy_cells_per_side));
      return gini_of_counts(kernels::assign_cells_serial(grid.cells(), sites));
    }
  }
  return kNaN;
}

// ---------------------------------------------------------------------------
// Random

std::vector<Placement> random_placements(std::span<const SegmentId> candidates, int budget,
                                         int repetitions, std::uint64_t seed) {
  const auto cand = sorted_unique(candidates);
  check_budget(budget, 0, cand.size());
  if (repetitions < 1) throw Error(ErrorKind::kParameter, "repetitions must be positive");
  std::vector<Placement> out;
  out.reserve(static_cast<std::size_t>(repetitions));
  std::vector<SegmentId> pool;
  for (int r = 0; r < repetitions; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    pool = cand;
    for (std::size_t i = 0; i < static_cast<std::size_t>(budget); ++i) {
      std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    }
    Placement p;
    p.strategy.family = StrategyFamily::kRandom;
    p.budget = budget;
    p.seed = seed + static_cast<std::uint64_t>(r);
    p.selected.assign(pool.begin(), pool.begin() + budget);
    p.step_objectives.assign(p.selected.size(), kNaN);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Active learning

json ActiveLearningConfig::to_json() const {
  return {{"members", members},
          {"time_subsample", time_subsample},
          {"full_average", full_average},
          {"regressor", regressor.to_json()}};
}

ActiveLearningConfig ActiveLearningConfig::from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::kConfiguration, "active learning config must be an object");
  }
  ActiveLearningConfig c;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "members") c.members = value.get<int>();
      else if (key == "time_subsample") c.time_subsample = value.get<int>();
      else if (key == "full_average") c.full_average = value.get<bool>();
      else if (key == "regressor") c.regressor = RegressorConfig::from_json(value);
      else throw Error(ErrorKind::kConfiguration, "unknown active learning field '" + key + "'");
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfiguration,
                  "active learning field '" + key + "': " + std::string(e.what()));
    }
  }
  return c;
}

namespace {
constexpr std::uint64_t kSubsampleStream = std::uint64_t{0x5} << 40;
constexpr std::size_t kCandidateChunk = 256;
}  // namespace

Placement active_learning_place(const ModelFeatures& features,
                                std::span<const SegmentId> candidates, int budget,
                                std::span<const SegmentId> initial,
                                const ActiveLearningConfig& config, std::uint64_t seed,
                                const RegressorTrainer* trainer) {
  if (config.members < 2) {
    throw Error(ErrorKind::kArity, "active learning needs at least 2 ensemble members");
  }
  if (!config.full_average && config.time_subsample < 1) {
    throw Error(ErrorKind::kParameter, "time_subsample must be positive");
  }
  config.regressor.validate();
  const auto cand = sorted_unique(candidates);
  check_budget(budget, initial.size(), cand.size());
  positions_of(cand, initial);

  Placement p;
  p.strategy.family = StrategyFamily::kActiveLearning;
  p.budget = budget;
  p.seed = seed;
  p.initial.assign(initial.begin(), initial.end());
  p.selected = p.initial;
  p.step_objectives.assign(p.selected.size(), kNaN);
  std::set<SegmentId> taken(p.selected.begin(), p.selected.end());
  if (p.selected.empty()) {
    Rng rng(seed);
    const SegmentId first = cand[uniform_index(rng, cand.size())];
    p.selected.push_back(first);
    p.step_objectives.push_back(kNaN);
    taken.insert(first);
  }

  const auto& all_steps = features.time_steps();
  if (all_steps.empty()) throw Error(ErrorKind::kEvaluation, "dataset has no observations");
  while (p.selected.size() < static_cast<std::size_t>(budget)) {
    const std::uint64_t iteration = p.selected.size();
    const TrainingRows rows = features.observation_rows(p.selected);
    if (rows.targets.empty()) {
      throw Error(ErrorKind::kEvaluation, "selected segments have no observations");
    }
    const std::uint64_t ens_seed = derive_seed(seed, iteration);
    const BootstrapEnsemble ensemble =
        trainer ? fit_bootstrap_ensemble(*trainer, rows.features, rows.targets, config.members,
                                         ens_seed)
                : fit_bootstrap_ensemble(config.regressor, rows.features, rows.targets,
                                         config.members, ens_seed);

    std::vector<TimeStep> steps = all_steps;
    const auto t = static_cast<std::size_t>(std::max(config.time_subsample, 1));
    if (!config.full_average && steps.size() > t) {
      Rng rng(derive_seed(seed ^ kSubsampleStream, iteration));
      for (std::size_t i = 0; i < t; ++i) {
        std::swap(steps[i], steps[i + uniform_index(rng, steps.size() - i)]);
      }
      steps.resize(t);
      std::sort(steps.begin(), steps.end());
    }

    std::vector<SegmentId> remaining;
    for (SegmentId id : cand) {
      if (!taken.count(id)) remaining.push_back(id);
    }
    std::vector<double> mean_var(remaining.size(), 0.0);
    for (std::size_t lo = 0; lo < remaining.size(); lo += kCandidateChunk) {
      const std::size_t hi = std::min(remaining.size(), lo + kCandidateChunk);
      Matrix block((hi - lo) * steps.size(), features.width());
      for (std::size_t k = lo; k < hi; ++k) {
        for (std::size_t s = 0; s < steps.size(); ++s) {
          features.encode(remaining[k], steps[s], block.row((k - lo) * steps.size() + s));
        }
      }
      const auto stats = ensemble_stats(ensemble, block);
      for (std::size_t k = lo; k < hi; ++k) {
        double acc = 0.0;
        for (std::size_t s = 0; s < steps.size(); ++s) {
          acc += stats[(k - lo) * steps.size() + s].variance;
        }
        mean_var[k] = acc / static_cast<double>(steps.size());
      }
    }
    const auto best = best_position(mean_var, Direction::kMaximize);
    if (!best) throw Error(ErrorKind::kBudget, "no candidate left to add");
    p.selected.push_back(remaining[*best]);
    p.step_objectives.push_back(mean_var[*best]);
    taken.insert(remaining[*best]);
    spdlog::debug("active learning step {}: segment {} (mean variance {})", iteration,
                  remaining[*best], mean_var[*best]);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Dispatch

Placement place(const StrategyDescriptor& strategy, const PlacementInputs& in, int budget,
                std::span<const SegmentId> initial, std::uint64_t seed) {
  if (in.dataset == nullptr) throw Error(ErrorKind::kConfiguration, "placement needs a dataset");
  const Dataset& ds = *in.dataset;
  const auto cand = sorted_unique(in.candidates);
  Placement p;
  switch (strategy.family) {
    case StrategyFamily::kBetweenness:
    case StrategyFamily::kCloseness: {
      const bool btw = strategy.family == StrategyFamily::kBetweenness;
      std::shared_ptr<const CentralityScores> scores = btw ? in.betweenness : in.closeness;
      if (!scores) {
        scores = std::make_shared<CentralityScores>(centrality_scores(
            ds.graph, btw ? CentralityKind::kBetweenness : CentralityKind::kCloseness,
            in.execution));
      }
      p = rank_place(*scores, cand, budget, initial);
      p.seed = seed;
      break;
    }
    case StrategyFamily::kFeatureDiversity:
    case StrategyFamily::kFeatureRedundancy:
    case StrategyFamily::kFeatureCoverage:
    case StrategyFamily::kDispersion:
    case StrategyFamily::kVoronoiGini: {
      GreedyContext ctx;
      ctx.candidates = cand;
      ctx.greedy_cells_per_side = in.greedy_cells_per_side;
      ctx.execution = in.execution;
      GreedyObjective objective = GreedyObjective::kDispersion;
      if (strategy.uses_features()) {
        ctx.features = encode_static_subset(ds, cand, strategy.feature_subset, cand);
        objective = strategy.family == StrategyFamily::kFeatureDiversity
                        ? GreedyObjective::kDiversity
                        : strategy.family == StrategyFamily::kFeatureRedundancy
                              ? GreedyObjective::kRedundancy
                              : GreedyObjective::kCoverage;
      } else {
        for (SegmentId id : cand) ctx.midpoints.push_back(ds.segment(id).midpoint);
        if (strategy.family == StrategyFamily::kVoronoiGini) {
          objective = GreedyObjective::kVoronoiGini;
          ctx.area = ds.area();
        }
      }
      p = greedy_place(objective, ctx, budget, initial, seed);
      break;
    }
    case StrategyFamily::kActiveLearning: {
      if (in.features == nullptr) {
        throw Error(ErrorKind::kConfiguration, "active_learning needs model features");
      }
      p = active_learning_place(*in.features, cand, budget, initial, in.active_learning, seed);
      break;
    }
    case StrategyFamily::kRandom: {
      check_budget(budget, initial.size(), cand.size());
      positions_of(cand, initial);
      std::set<SegmentId> init(initial.begin(), initial.end());
      std::vector<SegmentId> rest;
      for (SegmentId id : cand) {
        if (!init.count(id)) rest.push_back(id);
      }
      p.strategy.family = StrategyFamily::kRandom;
      p.budget = budget;
      p.seed = seed;
      p.initial.assign(initial.begin(), initial.end());
      p.selected = p.initial;
      const int extra = budget - static_cast<int>(initial.size());
      if (extra > 0) {
        const auto draw = random_placements(rest, extra, 1, seed).front();
        p.selected.insert(p.selected.end(), draw.selected.begin(), draw.selected.end());
      }
      p.step_objectives.assign(p.selected.size(), kNaN);
      break;
    }
    case StrategyFamily::kExisting:
    case StrategyFamily::kAllTraining:
      throw Error(ErrorKind::kConfiguration,
                  "'" + strategy.name() + "' is a baseline, not a placement strategy");
  }
  p.strategy = strategy;
  return p;
}

}  // namespace sensorplace
