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

// Citywide interpolation models: a regression interface, the default
// gradient-boosted tree regressor, a nearest-rows baseline, and bootstrap
// ensembles for predictive variance.

#ifndef SENSORPLACE_INTERPOLATOR_H_
#define SENSORPLACE_INTERPOLATOR_H_

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "sensorplace/common.h"

namespace sensorplace {

enum class SplitMode { kExact, kBinned };

struct RegressorConfig {
  int n_trees = 200;
  int max_depth = 6;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;
  std::uint64_t seed = 0;
  SplitMode split_mode = SplitMode::kExact;
  int max_bins = 256;  // binned mode only

  // Throws kParameter when a field is out of range.
  void validate() const;
  nlohmann::json to_json() const;
  // Fields absent from `doc` keep the values in `base`.
  static RegressorConfig from_json(const nlohmann::json& doc,
                                   const RegressorConfig& base);
  static RegressorConfig from_json(const nlohmann::json& doc);

  friend bool operator==(const RegressorConfig&, const RegressorConfig&) = default;
};

// Anything that maps encoded feature rows to volume predictions.
class Regressor {
 public:
  virtual ~Regressor() = default;
  // Throws kShape when rows.cols() != n_features().
  virtual std::vector<double> predict(const Matrix& rows) const = 0;
  virtual std::size_t n_features() const = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output before the learning rate

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Routing: x[feature] <= threshold goes left.
struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

class RegressorModel final : public Regressor {
 public:
  RegressorModel() = default;
  RegressorModel(RegressorConfig config, std::size_t n_features,
                 double base_prediction, std::vector<RegressionTree> trees);

  std::vector<double> predict(const Matrix& rows) const override;
  std::size_t n_features() const override { return n_features_; }
  double predict_row(std::span<const double> x) const;

  const RegressorConfig& config() const { return config_; }
  double base_prediction() const { return base_prediction_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  // Versioned document; each tree is its flat node array, indices preserved.
  nlohmann::json to_json() const;
  static RegressorModel from_json(const nlohmann::json& doc);

  friend bool operator==(const RegressorModel& a, const RegressorModel& b) {
    return a.config_ == b.config_ && a.n_features_ == b.n_features_ &&
           a.base_prediction_ == b.base_prediction_ && a.trees_ == b.trees_;
  }

 private:
  RegressorConfig config_;
  std::size_t n_features_ = 0;
  double base_prediction_ = 0.0;
  std::vector<RegressionTree> trees_;
};

// Stagewise squared-error boosting from the target mean. Each tree fits the
// current residuals with greedy level-wise splits (exact: every observed
// threshold; binned: up to max_bins quantile thresholds); leaves hold the
// mean residual. Split ties prefer the lowest feature index, then the lowest
// threshold. When `training_mse` is given it receives the training MSE after
// each tree.
RegressorModel fit_regressor(const RegressorConfig& config,
                             const Matrix& features,
                             std::span<const double> targets,
                             std::vector<double>* training_mse = nullptr);

std::vector<double> predict_regressor(const RegressorModel& model,
                                      const Matrix& rows);

// Mean target of the k nearest training rows (Euclidean, ties by row order).
class NearestRowsRegressor final : public Regressor {
 public:
  NearestRowsRegressor(Matrix features, std::vector<double> targets, int k);

  std::vector<double> predict(const Matrix& rows) const override;
  std::size_t n_features() const override { return features_.cols(); }

 private:
  Matrix features_;
  std::vector<double> targets_;
  int k_;
};

using RegressorTrainer = std::function<std::shared_ptr<const Regressor>(
    const Matrix& features, std::span<const double> targets,
    std::uint64_t seed)>;

RegressorTrainer boosted_tree_trainer(RegressorConfig config);
RegressorTrainer nearest_rows_trainer(int k);

struct EnsemblePrediction {
  double mean = 0.0;
  double variance = 0.0;  // divisor M - 1
};

class BootstrapEnsemble {
 public:
  // Throws kArity for fewer than 2 members.
  explicit BootstrapEnsemble(std::vector<std::shared_ptr<const Regressor>> members,
                             std::uint64_t seed = 0);

  std::size_t size() const { return members_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::shared_ptr<const Regressor>>& members() const {
    return members_;
  }

 private:
  std::vector<std::shared_ptr<const Regressor>> members_;
  std::uint64_t seed_;
};

// Member m is trained on a with-replacement resample of all rows drawn from
// derive_seed(seed, m).
BootstrapEnsemble fit_bootstrap_ensemble(const RegressorTrainer& trainer,
                                         const Matrix& features,
                                         std::span<const double> targets,
                                         int members, std::uint64_t seed);
BootstrapEnsemble fit_bootstrap_ensemble(const RegressorConfig& config,
                                         const Matrix& features,
                                         std::span<const double> targets,
                                         int members, std::uint64_t seed);

std::vector<EnsemblePrediction> ensemble_stats(const BootstrapEnsemble& ensemble,
                                               const Matrix& rows);

}  // namespace sensorplace

#endif  // SENSORPLACE_INTERPOLATOR_H_
