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

#include "sensorplace/interpolator.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace sensorplace {

void RegressorConfig::validate() const {
  if (n_trees < 1) throw Error(ErrorKind::kParameter, "n_trees must be >= 1");
  if (max_depth < 1) throw Error(ErrorKind::kParameter, "max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorKind::kParameter, "learning_rate must be in (0, 1]");
  }
  if (min_samples_leaf < 1) {
    throw Error(ErrorKind::kParameter, "min_samples_leaf must be >= 1");
  }
  if (max_bins < 2) throw Error(ErrorKind::kParameter, "max_bins must be >= 2");
}

nlohmann::json RegressorConfig::to_json() const {
  return {{"n_trees", n_trees},
          {"max_depth", max_depth},
          {"learning_rate", learning_rate},
          {"min_samples_leaf", min_samples_leaf},
          {"seed", seed},
          {"split_mode", split_mode == SplitMode::kExact ? "exact" : "binned"},
          {"max_bins", max_bins}};
}

RegressorConfig RegressorConfig::from_json(const nlohmann::json& doc) {
  return from_json(doc, RegressorConfig{});
}

RegressorConfig RegressorConfig::from_json(const nlohmann::json& doc,
                                           const RegressorConfig& defaults) {
  RegressorConfig base = defaults;
  if (!doc.is_object()) {
    throw Error(ErrorKind::kConfiguration, "regressor config must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "n_trees") {
      base.n_trees = value.get<int>();
    } else if (key == "max_depth") {
      base.max_depth = value.get<int>();
    } else if (key == "learning_rate") {
      base.learning_rate = value.get<double>();
    } else if (key == "min_samples_leaf") {
      base.min_samples_leaf = value.get<int>();
    } else if (key == "seed") {
      base.seed = value.get<std::uint64_t>();
    } else if (key == "split_mode") {
      const auto mode = value.get<std::string>();
      if (mode == "exact") {
        base.split_mode = SplitMode::kExact;
      } else if (mode == "binned") {
        base.split_mode = SplitMode::kBinned;
      } else {
        throw Error(ErrorKind::kConfiguration, "unknown split_mode '" + mode + "'");
      }
    } else if (key == "max_bins") {
      base.max_bins = value.get<int>();
    } else {
      throw Error(ErrorKind::kConfiguration, "unknown regressor field '" + key + "'");
    }
  }
  base.validate();
  return base;
}

double RegressionTree::predict(std::span<const double> x) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    const TreeNode& node = nodes[n];
    n = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes[n].value;
}

RegressorModel::RegressorModel(RegressorConfig config, std::size_t n_features,
                               double base_prediction,
                               std::vector<RegressionTree> trees)
    : config_(config),
      n_features_(n_features),
      base_prediction_(base_prediction),
      trees_(std::move(trees)) {}

double RegressorModel::predict_row(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return base_prediction_ + config_.learning_rate * sum;
}

std::vector<double> RegressorModel::predict(const Matrix& rows) const {
  if (rows.rows() > 0 && rows.cols() != n_features_) {
    throw Error(ErrorKind::kShape, "expected " + std::to_string(n_features_) +
                                       " features, got " +
                                       std::to_string(rows.cols()));
  }
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = predict_row(rows.row(i));
  return out;
}

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& node : tree.nodes) {
    if (node.feature < 0) {
      nodes.push_back({{"leaf", node.value}});
    } else {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"value", node.value},
                       {"left", node.left},
                       {"right", node.right}});
    }
  }
  return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& doc) {
  RegressionTree tree;
  const int n = static_cast<int>(doc.size());
  for (const auto& rec : doc) {
    TreeNode node;
    if (rec.contains("leaf")) {
      node.value = rec["leaf"].get<double>();
    } else {
      node.feature = rec.at("feature").get<int>();
      node.threshold = rec.at("threshold").get<double>();
      node.value = rec.value("value", 0.0);
      node.left = rec.at("left").get<int>();
      node.right = rec.at("right").get<int>();
      if (node.feature < 0 || node.left <= 0 || node.left >= n ||
          node.right <= 0 || node.right >= n) {
        throw Error(ErrorKind::kParse, "tree node references a missing child");
      }
    }
    tree.nodes.push_back(node);
  }
  if (tree.nodes.empty()) throw Error(ErrorKind::kParse, "empty tree");
  return tree;
}

constexpr int kModelVersion = 1;

}  // namespace

nlohmann::json RegressorModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(tree_to_json(t));
  return {{"format", "sensorplace.boosted_trees"},
          {"version", kModelVersion},
          {"config", config_.to_json()},
          {"n_features", n_features_},
          {"base_prediction", base_prediction_},
          {"trees", trees}};
}

RegressorModel RegressorModel::from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "sensorplace.boosted_trees" ||
      doc.value("version", 0) != kModelVersion) {
    throw Error(ErrorKind::kParse, "not a version-1 boosted tree document");
  }
  std::vector<RegressionTree> trees;
  for (const auto& t : doc.at("trees")) {
    trees.push_back(tree_from_json(t));
  }
  return RegressorModel(RegressorConfig::from_json(doc.at("config")),
                        doc.at("n_features").get<std::size_t>(),
                        doc.at("base_prediction").get<double>(),
                        std::move(trees));
}

namespace {

struct NodeStats {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t count = 0;
};

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  std::uint32_t bin = 0;  // binned mode: rows with bin <= this go left
};

// Presorted row orders (exact) or per-row bin indices (binned) per feature.
class SplitIndex {
 public:
  SplitIndex(const Matrix& x, SplitMode mode, int max_bins) : mode_(mode) {
    const std::size_t n = x.rows();
    const std::size_t f = x.cols();
    if (mode == SplitMode::kExact) {
      order_.resize(f);
      for (std::size_t j = 0; j < f; ++j) {
        auto& o = order_[j];
        o.resize(n);
        std::iota(o.begin(), o.end(), 0u);
        std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) {
          return x(a, j) < x(b, j);
        });
      }
      return;
    }
    cuts_.resize(f);
    bins_.assign(n * f, 0);
    std::vector<double> values(n);
    for (std::size_t j = 0; j < f; ++j) {
      for (std::size_t i = 0; i < n; ++i) values[i] = x(i, j);
      std::sort(values.begin(), values.end());
      std::vector<double> distinct(values);
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      auto& cuts = cuts_[j];
      if (static_cast<int>(distinct.size()) <= max_bins) {
        cuts = distinct;
      } else {
        for (int b = 1; b < max_bins; ++b) {
          const std::size_t pos = static_cast<std::size_t>(
              (static_cast<double>(b) * static_cast<double>(n)) / max_bins);
          cuts.push_back(values[std::min(n - 1, pos > 0 ? pos - 1 : 0)]);
        }
        cuts.push_back(values.back());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      }
      for (std::size_t i = 0; i < n; ++i) {
        bins_[i * f + j] = static_cast<std::uint32_t>(
            std::lower_bound(cuts.begin(), cuts.end(), x(i, j)) - cuts.begin());
      }
    }
  }

  SplitMode mode() const { return mode_; }
  const std::vector<std::uint32_t>& order(std::size_t j) const { return order_[j]; }
  const std::vector<double>& cuts(std::size_t j) const { return cuts_[j]; }
  std::uint32_t bin(std::size_t i, std::size_t j, std::size_t f) const {
    return bins_[i * f + j];
  }

 private:
  SplitMode mode_;
  std::vector<std::vector<std::uint32_t>> order_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::uint32_t> bins_;
};

inline double split_gain(double left_sum, std::size_t left_n, double total,
                         std::size_t n) {
  const double right_sum = total - left_sum;
  const std::size_t right_n = n - left_n;
  return left_sum * left_sum / static_cast<double>(left_n) +
         right_sum * right_sum / static_cast<double>(right_n) -
         total * total / static_cast<double>(n);
}

// Best split of every active slot over one feature. `slot_of` maps tree node
// ids to active slot or -1.
void search_feature_exact(const Matrix& x, std::size_t j, const SplitIndex& index,
                          std::span<const double> residual,
                          std::span<const int> node_of, std::span<const int> slot_of,
                          std::span<const NodeStats> stats, std::size_t min_leaf,
                          std::span<SplitChoice> best) {
  struct Scan {
    double left_sum = 0.0;
    std::size_t left_n = 0;
    double group_sum = 0.0;
    std::size_t group_n = 0;
    double last = 0.0;
  };
  std::vector<Scan> scan(stats.size());
  for (std::uint32_t i : index.order(j)) {
    const int slot = slot_of[node_of[i]];
    if (slot < 0) continue;
    Scan& s = scan[slot];
    const double v = x(i, j);
    if (s.group_n > 0 && v != s.last) {
      s.left_sum += s.group_sum;
      s.left_n += s.group_n;
      s.group_sum = 0.0;
      s.group_n = 0;
      const NodeStats& st = stats[slot];
      if (s.left_n >= min_leaf && st.count - s.left_n >= min_leaf) {
        const double g = split_gain(s.left_sum, s.left_n, st.sum, st.count);
        if (g > best[slot].gain) {
          best[slot] = {g, static_cast<int>(j), s.last, 0};
        }
      }
    }
    s.group_sum += residual[i];
    ++s.group_n;
    s.last = v;
  }
}

void search_feature_binned(std::size_t j, std::size_t f, const SplitIndex& index,
                           std::span<const double> residual,
                           std::span<const int> node_of, std::span<const int> slot_of,
                           std::span<const NodeStats> stats, std::size_t min_leaf,
                           std::span<SplitChoice> best) {
  const auto& cuts = index.cuts(j);
  const std::size_t nb = cuts.size();
  std::vector<double> hist_sum(stats.size() * nb, 0.0);
  std::vector<std::size_t> hist_n(stats.size() * nb, 0);
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const int slot = slot_of[node_of[i]];
    if (slot < 0) continue;
    const std::size_t b = index.bin(i, j, f);
    hist_sum[slot * nb + b] += residual[i];
    ++hist_n[slot * nb + b];
  }
  for (std::size_t slot = 0; slot < stats.size(); ++slot) {
    const NodeStats& st = stats[slot];
    double left_sum = 0.0;
    std::size_t left_n = 0;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      if (hist_n[slot * nb + b] == 0) continue;
      left_sum += hist_sum[slot * nb + b];
      left_n += hist_n[slot * nb + b];
      if (left_n >= st.count) break;
      if (left_n >= min_leaf && st.count - left_n >= min_leaf) {
        const double g = split_gain(left_sum, left_n, st.sum, st.count);
        if (g > best[slot].gain) {
          best[slot] = {g, static_cast<int>(j), cuts[b], static_cast<std::uint32_t>(b)};
        }
      }
    }
  }
}

// Grows one tree on `residual`; leaves the final leaf id of each row in
// `node_of`.
RegressionTree grow_tree(const Matrix& x, const SplitIndex& index,
                         const RegressorConfig& config,
                         std::span<const double> residual, std::vector<int>& node_of) {
  const std::size_t n = x.rows();
  const std::size_t f = x.cols();
  const auto min_leaf = static_cast<std::size_t>(config.min_samples_leaf);
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::fill(node_of.begin(), node_of.end(), 0);
  std::vector<int> active{0};

  for (int depth = 0; !active.empty(); ++depth) {
    std::vector<NodeStats> stats(active.size());
    std::vector<int> slot_of(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < active.size(); ++s) slot_of[active[s]] = static_cast<int>(s);
    for (std::size_t i = 0; i < n; ++i) {
      const int slot = slot_of[node_of[i]];
      if (slot < 0) continue;
      stats[slot].sum += residual[i];
      stats[slot].sumsq += residual[i] * residual[i];
      ++stats[slot].count;
    }
    for (std::size_t s = 0; s < active.size(); ++s) {
      TreeNode& node = tree.nodes[active[s]];
      node.value = stats[s].count > 0 ? stats[s].sum / static_cast<double>(stats[s].count) : 0.0;
    }
    if (depth >= config.max_depth) break;

    // Slots that cannot be split are deactivated before the scan.
    for (std::size_t s = 0; s < active.size(); ++s) {
      if (stats[s].count < 2 * min_leaf) slot_of[active[s]] = -1;
    }

    std::vector<std::vector<SplitChoice>> per_feature(
        f, std::vector<SplitChoice>(active.size()));
    const long long nf = static_cast<long long>(f);
#pragma omp parallel for schedule(dynamic, 1) if (nf > 1 && n > 4096)
    for (long long jj = 0; jj < nf; ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      if (index.mode() == SplitMode::kExact) {
        search_feature_exact(x, j, index, residual, node_of, slot_of, stats,
                             min_leaf, per_feature[j]);
      } else {
        search_feature_binned(j, f, index, residual, node_of, slot_of, stats,
                              min_leaf, per_feature[j]);
      }
    }

    std::vector<int> next;
    std::vector<SplitChoice> chosen(active.size());
    for (std::size_t s = 0; s < active.size(); ++s) {
      if (slot_of[active[s]] < 0) continue;
      // Ties keep the earlier feature: strict comparison in feature order.
      SplitChoice best;
      for (std::size_t j = 0; j < f; ++j) {
        if (per_feature[j][s].gain > best.gain) best = per_feature[j][s];
      }
      if (best.feature < 0 || !(best.gain > 1e-12 * stats[s].sumsq)) {
        slot_of[active[s]] = -1;
        continue;
      }
      chosen[s] = best;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[active[s]];
      node.feature = best.feature;
      node.threshold = best.threshold;
      node.left = left;
      node.right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int slot = slot_of[node_of[i]];
      if (slot < 0) continue;
      const SplitChoice& c = chosen[slot];
      const TreeNode& node = tree.nodes[node_of[i]];
      const bool go_left = index.mode() == SplitMode::kExact
                               ? x(i, c.feature) <= c.threshold
                               : index.bin(i, c.feature, f) <= c.bin;
      node_of[i] = go_left ? node.left : node.right;
    }
    active = std::move(next);
  }
  return tree;
}

}  // namespace

RegressorModel fit_regressor(const RegressorConfig& config, const Matrix& features,
                             std::span<const double> targets,
                             std::vector<double>* training_mse) {
  config.validate();
  const std::size_t n = features.rows();
  if (n == 0) throw Error(ErrorKind::kFit, "cannot fit a regressor on zero rows");
  if (targets.size() != n) {
    throw Error(ErrorKind::kShape, "feature and target row counts differ");
  }
  for (double y : targets) {
    if (!std::isfinite(y)) throw Error(ErrorKind::kData, "non-finite target value");
  }
  const double base =
      std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);
  std::vector<double> pred(n, base);
  std::vector<double> residual(n);
  std::vector<int> node_of(n, 0);
  const SplitIndex index(features, config.split_mode, config.max_bins);

  std::vector<RegressionTree> trees;
  trees.reserve(config.n_trees);
  if (training_mse) training_mse->clear();
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = targets[i] - pred[i];
    RegressionTree tree = grow_tree(features, index, config, residual, node_of);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] += config.learning_rate * tree.nodes[node_of[i]].value;
      sse += (targets[i] - pred[i]) * (targets[i] - pred[i]);
    }
    if (training_mse) training_mse->push_back(sse / static_cast<double>(n));
    trees.push_back(std::move(tree));
  }
  return RegressorModel(config, features.cols(), base, std::move(trees));
}

std::vector<double> predict_regressor(const RegressorModel& model, const Matrix& rows) {
  return model.predict(rows);
}

NearestRowsRegressor::NearestRowsRegressor(Matrix features, std::vector<double> targets,
                                           int k)
    : features_(std::move(features)), targets_(std::move(targets)), k_(k) {
  if (features_.rows() == 0) throw Error(ErrorKind::kFit, "no training rows");
  if (targets_.size() != features_.rows()) {
    throw Error(ErrorKind::kShape, "feature and target row counts differ");
  }
  if (k_ < 1) throw Error(ErrorKind::kParameter, "k must be >= 1");
}

std::vector<double> NearestRowsRegressor::predict(const Matrix& rows) const {
  if (rows.rows() > 0 && rows.cols() != features_.cols()) {
    throw Error(ErrorKind::kShape, "feature width mismatch");
  }
  const std::size_t k = std::min<std::size_t>(k_, features_.rows());
  std::vector<double> out(rows.rows());
  std::vector<std::pair<double, std::size_t>> dist(features_.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t i = 0; i < features_.rows(); ++i) {
      double d = 0.0;
      for (std::size_t c = 0; c < features_.cols(); ++c) {
        const double diff = rows(r, c) - features_(i, c);
        d += diff * diff;
      }
      dist[i] = {d, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                      dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += targets_[dist[i].second];
    out[r] = sum / static_cast<double>(k);
  }
  return out;
}

RegressorTrainer boosted_tree_trainer(RegressorConfig config) {
  config.validate();
  return [config](const Matrix& x, std::span<const double> y, std::uint64_t seed) {
    RegressorConfig c = config;
    c.seed = seed;
    return std::make_shared<const RegressorModel>(fit_regressor(c, x, y));
  };
}

RegressorTrainer nearest_rows_trainer(int k) {
  return [k](const Matrix& x, std::span<const double> y, std::uint64_t) {
    return std::make_shared<const NearestRowsRegressor>(
        x, std::vector<double>(y.begin(), y.end()), k);
  };
}

BootstrapEnsemble::BootstrapEnsemble(
    std::vector<std::shared_ptr<const Regressor>> members, std::uint64_t seed)
    : members_(std::move(members)), seed_(seed) {
  if (members_.size() < 2) {
    throw Error(ErrorKind::kArity, "an ensemble needs at least 2 members");
  }
}

BootstrapEnsemble fit_bootstrap_ensemble(const RegressorTrainer& trainer,
                                         const Matrix& features,
                                         std::span<const double> targets,
                                         int members, std::uint64_t seed) {
  if (members < 2) throw Error(ErrorKind::kArity, "an ensemble needs at least 2 members");
  const std::size_t n = features.rows();
  if (n == 0) throw Error(ErrorKind::kFit, "cannot fit an ensemble on zero rows");
  if (targets.size() != n) {
    throw Error(ErrorKind::kShape, "feature and target row counts differ");
  }
  std::vector<std::shared_ptr<const Regressor>> fitted(members);
#pragma omp parallel for schedule(dynamic, 1)
  for (int m = 0; m < members; ++m) {
    const std::uint64_t member_seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    Rng rng(member_seed);
    std::vector<std::size_t> picks(n);
    for (auto& p : picks) p = uniform_index(rng, n);
    Matrix x = select_rows(features, picks);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = targets[picks[i]];
    fitted[m] = trainer(x, y, member_seed);
  }
  return BootstrapEnsemble(std::move(fitted), seed);
}

BootstrapEnsemble fit_bootstrap_ensemble(const RegressorConfig& config,
                                         const Matrix& features,
                                         std::span<const double> targets,
                                         int members, std::uint64_t seed) {
  return fit_bootstrap_ensemble(boosted_tree_trainer(config), features, targets,
                                members, seed);
}

std::vector<EnsemblePrediction> ensemble_stats(const BootstrapEnsemble& ensemble,
                                               const Matrix& rows) {
  const std::size_t m = ensemble.size();
  std::vector<std::vector<double>> preds;
  preds.reserve(m);
  for (const auto& member : ensemble.members()) preds.push_back(member->predict(rows));
  std::vector<EnsemblePrediction> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    double mean = 0.0;
    for (std::size_t k = 0; k < m; ++k) mean += preds[k][r];
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) ss += (preds[k][r] - mean) * (preds[k][r] - mean);
    out[r] = {mean, ss / static_cast<double>(m - 1)};
  }
  return out;
}

}  // namespace sensorplace
