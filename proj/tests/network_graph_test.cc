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

#include <random>

#include <omp.h>

#include "oracles.h"
#include "sensorplace/network_graph.h"

namespace sensorplace {
namespace {

SegmentGraph path_graph(int n) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  std::vector<SegmentId> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back(10 * (i + 1));
    if (i + 1 < n) adj[static_cast<std::size_t>(i)].push_back(i + 1);
  }
  return SegmentGraph(ids, adj);
}

TEST(SegmentGraph, SymmetrizesAndDropsLoopsAndDuplicates) {
  const SegmentGraph g({1, 2, 3}, {{1, 1, 0}, {}, {0}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.adjacent(1), (std::vector<SegmentId>{2, 3}));
  EXPECT_EQ(g.adjacent(2), (std::vector<SegmentId>{1}));
  EXPECT_THROW(g.index_of(99), Error);
}

TEST(BuildSegmentGraph, SharedNodeIdsMakeNeighbors) {
  std::vector<Segment> segs(3);
  segs[0] = {1, {0, 0}, 100, 101};
  segs[1] = {2, {1, 0}, 101, 102};
  segs[2] = {3, {5, 5}, 200, 201};
  const SegmentGraph g = build_segment_graph(segs);
  EXPECT_EQ(g.adjacent(1), (std::vector<SegmentId>{2}));
  EXPECT_TRUE(g.adjacent(3).empty());
}

TEST(BuildSegmentGraph, SnapsEndpointCoordinatesWithinTolerance) {
  std::vector<Segment> segs(2);
  segs[0].id = 1;
  segs[0].endpoint_a_xy = Point2{0, 0};
  segs[0].endpoint_b_xy = Point2{10, 0};
  segs[1].id = 2;
  segs[1].endpoint_a_xy = Point2{10.3, 0};
  segs[1].endpoint_b_xy = Point2{20, 0};
  EXPECT_EQ(build_segment_graph(segs, 0.5).edge_count(), 1u);
  EXPECT_EQ(build_segment_graph(segs, 0.1).edge_count(), 0u);
}

TEST(Centrality, PathGraphClosedForm) {
  // Interior node i of a path of n nodes lies on i*(n-1-i) shortest paths.
  const SegmentGraph g = path_graph(5);
  const auto b = centrality_scores(g, CentralityKind::kBetweenness);
  EXPECT_EQ(b.values, (std::vector<double>{0, 3, 4, 3, 0}));
  const auto c = centrality_scores(g, CentralityKind::kCloseness);
  EXPECT_DOUBLE_EQ(c.values[2], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(c.at(10), 4.0 / 10.0);
}

TEST(Centrality, StarCenterCarriesAllPairs) {
  const SegmentGraph g({1, 2, 3, 4, 5}, {{1, 2, 3, 4}, {}, {}, {}, {}});
  const auto b = centrality_scores(g, CentralityKind::kBetweenness);
  EXPECT_DOUBLE_EQ(b.at(1), 6.0);
  EXPECT_DOUBLE_EQ(b.at(2), 0.0);
}

TEST(Centrality, DisconnectedComponentsAndSingletons) {
  const SegmentGraph g({1, 2, 3, 4}, {{1}, {}, {}, {}});
  const auto c = centrality_scores(g, CentralityKind::kCloseness);
  EXPECT_DOUBLE_EQ(c.at(1), 1.0);
  EXPECT_DOUBLE_EQ(c.at(3), 0.0);
  const auto b = centrality_scores(g, CentralityKind::kBetweenness);
  for (double v : b.values) EXPECT_EQ(v, 0.0);
}

TEST(Centrality, EmptyGraphThrows) {
  EXPECT_THROW(centrality_scores(SegmentGraph(), CentralityKind::kCloseness), Error);
}

TEST(CentralityProperty, MatchesBruteForceOnRandomGraphs) {
  for (int t = 0; t < 60; ++t) {
    std::mt19937_64 rng(t);
    const int n = std::uniform_int_distribution<int>(2, 30)(rng);
    const SegmentGraph g = oracle::random_connected_graph(n, n / 2, rng());
    const auto bt = oracle::brute_betweenness(g);
    const auto cl = oracle::brute_closeness(g);
    const auto b = centrality_scores(g, CentralityKind::kBetweenness);
    const auto c = centrality_scores(g, CentralityKind::kCloseness);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(b.values[static_cast<std::size_t>(i)], bt[static_cast<std::size_t>(i)], 1e-9);
      EXPECT_NEAR(c.values[static_cast<std::size_t>(i)], cl[static_cast<std::size_t>(i)], 1e-9);
    }
  }
}

TEST(CentralityProperty, ParallelKernelsMatchSerial) {
  for (int t = 0; t < 20; ++t) {
    const SegmentGraph g = oracle::random_connected_graph(50 + t * 7, 40, 77 + t);
    const auto bs = kernels::betweenness_serial(g);
    const auto bp = kernels::betweenness_parallel(g);
    for (std::size_t i = 0; i < bs.size(); ++i) EXPECT_NEAR(bs[i], bp[i], 1e-9 * (1 + bs[i]));
    EXPECT_EQ(kernels::closeness_serial(g), kernels::closeness_parallel(g));
  }
}

TEST(CentralityProperty, ParallelResultIndependentOfThreadCount) {
  const SegmentGraph g = oracle::random_connected_graph(300, 200, 9);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = kernels::betweenness_parallel(g);
  omp_set_num_threads(4);
  const auto four = kernels::betweenness_parallel(g);
  omp_set_num_threads(saved);
  EXPECT_EQ(one, four);
}

TEST(CentralityProperty, InvariantUnderIdRelabeling) {
  const SegmentGraph a = oracle::random_connected_graph(25, 10, 5);
  std::vector<std::vector<int>> adj(a.size());
  std::vector<SegmentId> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ids.push_back(1000 + static_cast<SegmentId>(i) * 3);
    for (int w : a.neighbors(static_cast<int>(i))) adj[i].push_back(w);
  }
  const SegmentGraph b(ids, adj);
  EXPECT_EQ(centrality_scores(a, CentralityKind::kBetweenness).values,
            centrality_scores(b, CentralityKind::kBetweenness).values);
}

}  // namespace
}  // namespace sensorplace
