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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sensorplace/interpolator.h"

namespace sensorplace {
namespace {

struct Fixture {
  Matrix x;
  std::vector<double> y;
};

Fixture random_fixture(std::uint64_t seed, std::size_t n, std::size_t d) {
  std::mt19937_64 rng(seed);
  Fixture f{Matrix(n, d), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) f.x(i, j) = std::normal_distribution<double>()(rng);
    f.y[i] = 5 * f.x(i, 0) + (d > 1 ? 3 * f.x(i, 1) * f.x(i, 1) : 0.0) +
             std::normal_distribution<double>(0, 0.5)(rng);
  }
  return f;
}

double mse(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

TEST(RegressorConfig, ValidatesAndRoundTrips) {
  RegressorConfig c;
  c.n_trees = 0;
  EXPECT_THROW(c.validate(), Error);
  c.n_trees = 7;
  c.split_mode = SplitMode::kBinned;
  EXPECT_EQ(RegressorConfig::from_json(c.to_json()), c);
  const RegressorConfig partial = RegressorConfig::from_json({{"max_depth", 2}}, c);
  EXPECT_EQ(partial.n_trees, 7);
  EXPECT_EQ(partial.max_depth, 2);
}

TEST(Regressor, SingleStumpOnStepFunction) {
  Matrix x(10, 1);
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = i < 5 ? 0.0 : 10.0;
  }
  RegressorConfig c;
  c.n_trees = 1;
  c.max_depth = 1;
  c.learning_rate = 1.0;
  c.min_samples_leaf = 1;
  const auto model = fit_regressor(c, x, y);
  ASSERT_EQ(model.trees().size(), 1u);
  EXPECT_EQ(model.trees()[0].nodes[0].feature, 0);
  EXPECT_DOUBLE_EQ(model.trees()[0].nodes[0].threshold, 4.0);
  const auto p = model.predict(x);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(p[i], y[i], 1e-12);
}

TEST(RegressorProperty, TrainingMseNonIncreasingPerTree) {
  for (int f = 0; f < 20; ++f) {
    const Fixture fx = random_fixture(f, 80 + 10 * static_cast<std::size_t>(f), 1 + f % 4);
    RegressorConfig c;
    c.n_trees = 25;
    c.max_depth = 1 + f % 5;
    c.min_samples_leaf = 1 + f % 4;
    std::vector<double> curve;
    const auto model = fit_regressor(c, fx.x, fx.y, &curve);
    ASSERT_EQ(curve.size(), 25u);
    for (std::size_t t = 1; t < curve.size(); ++t) EXPECT_LE(curve[t], curve[t - 1] * (1 + 1e-12));
    EXPECT_NEAR(curve.back(), mse(model.predict(fx.x), fx.y), 1e-9);
  }
}

TEST(Regressor, ConstantTargetPredictsConstantWithZeroEnsembleVariance) {
  const Fixture fx = random_fixture(3, 60, 3);
  const std::vector<double> y(60, 4.25);
  RegressorConfig c;
  c.n_trees = 10;
  for (double p : fit_regressor(c, fx.x, y).predict(fx.x)) EXPECT_DOUBLE_EQ(p, 4.25);
  const auto ens = fit_bootstrap_ensemble(c, fx.x, y, 4, 1);
  for (const auto& s : ensemble_stats(ens, fx.x)) {
    EXPECT_DOUBLE_EQ(s.mean, 4.25);
    EXPECT_EQ(s.variance, 0.0);
  }
}

TEST(Regressor, BinnedMatchesExactWhenBinsCoverEveryValue) {
  std::mt19937_64 rng(12);
  Matrix x(400, 2);
  std::vector<double> y(400);
  for (std::size_t i = 0; i < 400; ++i) {
    x(i, 0) = std::uniform_int_distribution<int>(0, 99)(rng);
    x(i, 1) = std::uniform_int_distribution<int>(0, 9)(rng) * 0.1;
    y[i] = std::sqrt(x(i, 0)) + 4 * x(i, 1) + std::normal_distribution<double>(0, 0.2)(rng);
  }
  RegressorConfig exact;
  exact.n_trees = 30;
  exact.max_depth = 5;
  RegressorConfig binned = exact;
  binned.split_mode = SplitMode::kBinned;
  const auto a = fit_regressor(exact, x, y);
  const auto b = fit_regressor(binned, x, y);
  EXPECT_EQ(a.predict(x), b.predict(x));
}

TEST(Regressor, DeterministicAndSerializable) {
  const Fixture fx = random_fixture(8, 200, 3);
  RegressorConfig c;
  c.n_trees = 15;
  const auto a = fit_regressor(c, fx.x, fx.y);
  const auto b = fit_regressor(c, fx.x, fx.y);
  EXPECT_EQ(a, b);
  EXPECT_EQ(RegressorModel::from_json(a.to_json()), a);
}

TEST(Regressor, ShapeAndFitErrors) {
  const Fixture fx = random_fixture(1, 20, 2);
  RegressorConfig c;
  c.n_trees = 2;
  EXPECT_THROW(fit_regressor(c, fx.x, std::vector<double>(19)), Error);
  EXPECT_THROW(fit_regressor(c, Matrix(), std::vector<double>()), Error);
  const auto model = fit_regressor(c, fx.x, fx.y);
  EXPECT_THROW(model.predict(Matrix(3, 5)), Error);
}

TEST(NearestRows, AveragesKNearest) {
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
  const NearestRowsRegressor r(x, {0, 10, 20, 30}, 2);
  Matrix q(1, 1);
  q(0, 0) = 0.9;
  EXPECT_DOUBLE_EQ(r.predict(q)[0], 5.0);
}

TEST(Ensemble, NeedsTwoMembersAndIsSeeded) {
  const Fixture fx = random_fixture(2, 100, 2);
  RegressorConfig c;
  c.n_trees = 5;
  EXPECT_THROW(fit_bootstrap_ensemble(c, fx.x, fx.y, 1, 0), Error);
  const auto a = ensemble_stats(fit_bootstrap_ensemble(c, fx.x, fx.y, 4, 5), fx.x);
  const auto b = ensemble_stats(fit_bootstrap_ensemble(c, fx.x, fx.y, 4, 5), fx.x);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean, b[i].mean);
    EXPECT_EQ(a[i].variance, b[i].variance);
    EXPECT_GE(a[i].variance, 0.0);
  }
}

}  // namespace
}  // namespace sensorplace
