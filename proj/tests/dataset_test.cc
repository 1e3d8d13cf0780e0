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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fixtures.h"
#include "oracles.h"
#include "sensorplace/dataset.h"

namespace sensorplace {
namespace {

using oracle::error_kind_of;

TEST(LoadDataset, MinimalBundle) {
  const Dataset ds = load_dataset(fixture::minimal_bundle("ds_minimal"));
  EXPECT_EQ(ds.segments.size(), 2u);
  EXPECT_EQ(ds.observations.size(), 4u);
  EXPECT_EQ(ds.calendar.dates().size(), 2u);
  EXPECT_EQ(ds.observations_of(1).size(), 2u);
  EXPECT_EQ(ds.graph.edge_count(), 1u);
  EXPECT_TRUE(ds.temporal_features.rows.empty());
}

TEST(LoadDataset, UnknownSegmentNamesTheRow) {
  const auto dir = fixture::minimal_bundle("ds_unknown");
  oracle::write_file(dir / "observations.csv",
                     "segment_id,date,count\n"
                     "1,2023-05-01,120\n"
                     "999,2023-05-01,7\n");
  try {
    load_dataset(dir);
    FAIL() << "expected an integrity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIntegrity);
    EXPECT_NE(std::string(e.what()).find("999"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, MissingRequiredFile) {
  const auto dir = fixture::minimal_bundle("ds_missing");
  std::filesystem::remove(dir / "observations.csv");
  EXPECT_EQ(error_kind_of([&] { load_dataset(dir); }), ErrorKind::kBundle);
}

TEST(LoadDataset, NonNumericCount) {
  const auto dir = fixture::minimal_bundle("ds_parse");
  oracle::write_file(dir / "observations.csv", "segment_id,date,count\n1,2023-05-01,many\n");
  EXPECT_EQ(error_kind_of([&] { load_dataset(dir); }), ErrorKind::kParse);
}

TEST(LoadDataset, RoundTrip) {
  SyntheticCityConfig c;
  c.width = 4;
  c.height = 3;
  c.n_days = 10;
  c.seed = 5;
  const Dataset a = generate_synthetic_city(c).first;
  const auto dir = oracle::scratch_dir("ds_roundtrip");
  save_dataset(a, dir);
  const Dataset b = load_dataset(dir);
  EXPECT_TRUE(a == b);
  save_dataset(b, dir / "again");
  EXPECT_TRUE(load_dataset(dir / "again") == a);
}

Dataset single_segment_counts(const std::vector<std::int64_t>& counts) {
  Dataset ds = load_dataset(fixture::minimal_bundle("ds_outlier"));
  std::vector<Date> dates;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    dates.push_back(add_days(parse_date("2023-01-01"), static_cast<int>(d)));
  }
  ds.calendar = Calendar(dates);
  ds.observations.clear();
  for (std::size_t d = 0; d < counts.size(); ++d) {
    ds.observations.push_back({1, dates[d], -1, counts[d]});
  }
  ds.reindex();
  return ds;
}

TEST(FilterOutliers, RemovesTheSpike) {
  std::vector<std::int64_t> counts(20, 10);
  counts.push_back(1000);
  const Dataset ds = single_segment_counts(counts);
  const auto [filtered, report] = filter_outliers(ds, 3.0);
  ASSERT_EQ(report.removed.size(), 1u);
  EXPECT_EQ(report.removed[0].count, 1000);
  EXPECT_EQ(report.total, 21u);
  EXPECT_NEAR(report.removal_fraction, 1.0 / 21.0, 1e-12);
  EXPECT_EQ(filtered.observations.size(), 20u);

  const auto again = filter_outliers(filtered, 3.0);
  EXPECT_TRUE(again.second.removed.empty());
}

TEST(FilterOutliers, MatchesDirectComputation) {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> draw(3.0, 0.6);
  std::vector<std::int64_t> counts;
  for (int i = 0; i < 60; ++i) counts.push_back(static_cast<std::int64_t>(draw(rng)));
  counts.push_back(5000);
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  double ss = 0.0;
  for (auto v : counts) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (counts.size() - 1));
  std::size_t expected = 0;
  for (auto v : counts) expected += std::abs(v - mean) > 3.0 * sd ? 1 : 0;
  const auto report = filter_outliers(single_segment_counts(counts), 3.0).second;
  EXPECT_EQ(report.removed.size(), expected);
}

TEST(FilterOutliers, ConstantAndSingletonSegmentsUntouched) {
  EXPECT_TRUE(filter_outliers(single_segment_counts(std::vector<std::int64_t>(15, 7))).second.removed.empty());
  EXPECT_TRUE(filter_outliers(single_segment_counts({42})).second.removed.empty());
  const Dataset ds = single_segment_counts({1, 2});
  EXPECT_EQ(error_kind_of([&] { filter_outliers(ds, 0.0); }), ErrorKind::kParameter);
}

std::vector<SegmentId> iota_ids(int n) {
  std::vector<SegmentId> ids(n);
  std::iota(ids.begin(), ids.end(), SegmentId{1});
  return ids;
}

TEST(SplitSegments, FractionArithmetic) {
  const auto a = split_segments(iota_ids(100), {}, 1);
  EXPECT_EQ(a.val.size(), 15u);
  EXPECT_EQ(a.test.size(), 15u);
  EXPECT_EQ(a.train.size(), 70u);
  const auto b = split_segments(iota_ids(20), {}, 1);
  EXPECT_EQ(b.val.size(), 3u);
  EXPECT_EQ(b.test.size(), 3u);
  EXPECT_EQ(b.train.size(), 14u);
}

TEST(SplitSegments, DeterministicAndSeedSensitive) {
  const auto ids = iota_ids(50);
  const auto a = split_segments(ids, {}, 7);
  const auto b = split_segments(ids, {}, 7);
  const auto c = split_segments(ids, {}, 8);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.test, c.test);
}

TEST(SplitSegments, TooFewSegments) {
  EXPECT_EQ(error_kind_of([] { split_segments(iota_ids(2), {}, 0); }), ErrorKind::kSplit);
}

TEST(SplitSegments, PinnedIdsStayInTrain) {
  const std::vector<SegmentId> pinned = {3, 9, 27};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = split_segments(iota_ids(30), {}, seed, pinned);
    for (SegmentId id : pinned) {
      EXPECT_TRUE(std::binary_search(s.train.begin(), s.train.end(), id));
    }
  }
}

TEST(SplitSegmentsProperty, DisjointAndExhaustive) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 400);
    const auto s = split_segments(iota_ids(n), {}, rng());
    std::multiset<SegmentId> all;
    all.insert(s.train.begin(), s.train.end());
    all.insert(s.val.begin(), s.val.end());
    all.insert(s.test.begin(), s.test.end());
    ASSERT_EQ(all.size(), static_cast<std::size_t>(n));
    ASSERT_EQ(std::set<SegmentId>(all.begin(), all.end()).size(), static_cast<std::size_t>(n));
    EXPECT_EQ(s.val.size(), std::max<std::size_t>(1, static_cast<std::size_t>(0.15 * n)));
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  }
}

TEST(SyntheticCity, GridEdgeCount) {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 5}, std::pair{20, 20}}) {
    SyntheticCityConfig c;
    c.width = w;
    c.height = h;
    c.n_days = 7;
    const auto ds = generate_synthetic_city(c).first;
    EXPECT_EQ(ds.segments.size(), static_cast<std::size_t>(2 * w * h - w - h));
  }
}

TEST(SyntheticCity, ZeroNoiseEqualsExpectedField) {
  SyntheticCityConfig c;
  c.width = 5;
  c.height = 4;
  c.n_days = 14;
  c.noise_scale = 0.0;
  const auto [ds, truth] = generate_synthetic_city(c);
  ASSERT_EQ(ds.observations.size(), ds.segments.size() * 14);
  const auto& dates = ds.calendar.dates();
  for (const Observation& o : ds.observations) {
    const std::size_t s = ds.segment_index(o.segment);
    const auto d = static_cast<std::size_t>(std::find(dates.begin(), dates.end(), o.date) - dates.begin());
    EXPECT_EQ(static_cast<double>(o.count), truth.expected(s, d));
    EXPECT_EQ(truth.expected(s, d), std::round(std::exp(truth.log_mean(s, d))));
  }
}

TEST(SyntheticCity, Deterministic) {
  SyntheticCityConfig c;
  c.width = 6;
  c.height = 6;
  c.n_days = 20;
  c.seed = 9;
  const auto a = generate_synthetic_city(c).first;
  const auto b = generate_synthetic_city(c).first;
  EXPECT_TRUE(a == b);
  const auto da = oracle::scratch_dir("ds_det_a");
  const auto db = oracle::scratch_dir("ds_det_b");
  save_dataset(a, da);
  save_dataset(b, db);
  for (const char* f : {"segments.csv", "observations.csv", "static_features.csv"}) {
    EXPECT_EQ(oracle::read_file(da / f), oracle::read_file(db / f)) << f;
  }
  c.seed = 10;
  EXPECT_FALSE(generate_synthetic_city(c).first == a);
}

TEST(SyntheticCity, RejectsDegenerateConfig) {
  SyntheticCityConfig c;
  c.width = 1;
  EXPECT_EQ(error_kind_of([&] { generate_synthetic_city(c); }), ErrorKind::kParameter);
  c.width = 3;
  c.n_days = 6;
  EXPECT_EQ(error_kind_of([&] { generate_synthetic_city(c); }), ErrorKind::kParameter);
}

TEST(SyntheticCity, RightSkewedCounts) {
  SyntheticCityConfig c;
  c.n_days = 14;
  const auto ds = generate_synthetic_city(c).first;
  std::vector<double> v;
  for (const auto& o : ds.observations) v.push_back(static_cast<double>(o.count));
  std::sort(v.begin(), v.end());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  EXPECT_GT(mean, v[v.size() / 2]);
}

}  // namespace
}  // namespace sensorplace
