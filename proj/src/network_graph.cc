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

#include "sensorplace/network_graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <utility>

namespace sensorplace {

SegmentGraph::SegmentGraph(std::vector<SegmentId> ids,
                           const std::vector<std::vector<int>>& adjacency)
    : ids_(std::move(ids)) {
  const int n = static_cast<int>(ids_.size());
  if (static_cast<int>(adjacency.size()) != n) {
    throw Error(ErrorKind::kShape, "adjacency size does not match node count");
  }
  if (!std::is_sorted(ids_.begin(), ids_.end()) ||
      std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw Error(ErrorKind::kSchema, "segment ids must be unique and sorted");
  }
  std::vector<std::vector<int>> sym(n);
  for (int i = 0; i < n; ++i) {
    for (int j : adjacency[i]) {
      if (j < 0 || j >= n) {
        throw Error(ErrorKind::kShape, "adjacency index out of range");
      }
      if (j == i) continue;
      sym[i].push_back(j);
      sym[j].push_back(i);
    }
  }
  offsets_.assign(1, 0);
  offsets_.reserve(n + 1);
  for (auto& list : sym) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    targets_.insert(targets_.end(), list.begin(), list.end());
    offsets_.push_back(static_cast<int>(targets_.size()));
  }
}

int SegmentGraph::index_of(SegmentId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw Error(ErrorKind::kSchema,
                "segment " + std::to_string(id) + " is not in the graph");
  }
  return static_cast<int>(it - ids_.begin());
}

bool SegmentGraph::contains(SegmentId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::vector<SegmentId> SegmentGraph::adjacent(SegmentId id) const {
  std::vector<SegmentId> out;
  for (int j : neighbors(index_of(id))) out.push_back(ids_[j]);
  return out;
}

namespace {

bool has_node_ids(const Segment& s) {
  return s.endpoint_a.has_value() || s.endpoint_b.has_value();
}

}  // namespace

SegmentGraph build_segment_graph(std::span<const Segment> segments,
                                 double snap_tolerance) {
  if (segments.empty()) {
    throw Error(ErrorKind::kEmptyGraph, "no segments supplied");
  }
  if (!(snap_tolerance >= 0.0)) {
    throw Error(ErrorKind::kParameter, "snap tolerance must be >= 0");
  }
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return segments[a].id < segments[b].id;
  });
  std::vector<SegmentId> ids;
  ids.reserve(segments.size());
  for (std::size_t k : order) {
    if (!ids.empty() && ids.back() == segments[k].id) {
      throw Error(ErrorKind::kSchema,
                  "duplicate segment id " + std::to_string(segments[k].id));
    }
    ids.push_back(segments[k].id);
  }

  const int n = static_cast<int>(ids.size());
  std::vector<std::vector<int>> adjacency(n);

  // Shared intersection ids: every pair of segments incident to a node.
  std::map<std::int64_t, std::vector<int>> incident;
  for (int i = 0; i < n; ++i) {
    const Segment& s = segments[order[i]];
    if (s.endpoint_a) incident[*s.endpoint_a].push_back(i);
    if (s.endpoint_b && s.endpoint_b != s.endpoint_a) {
      incident[*s.endpoint_b].push_back(i);
    }
  }
  for (const auto& [node, members] : incident) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        adjacency[members[a]].push_back(members[b]);
      }
    }
  }

  // Coordinate snapping for segments without node ids. Endpoints are hashed
  // on a grid of cell size max(tolerance, 1 mm) and compared against the
  // 3x3 neighborhood.
  struct Endpoint {
    Point2 p;
    int node;
  };
  std::vector<Endpoint> loose;
  for (int i = 0; i < n; ++i) {
    const Segment& s = segments[order[i]];
    if (s.endpoint_a_xy) loose.push_back({*s.endpoint_a_xy, i});
    if (s.endpoint_b_xy) loose.push_back({*s.endpoint_b_xy, i});
  }
  if (!loose.empty()) {
    const double cell = std::max(snap_tolerance, 1e-3);
    const double tol2 = snap_tolerance * snap_tolerance;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> grid;
    auto key = [cell](Point2 p) {
      return std::pair<std::int64_t, std::int64_t>{
          static_cast<std::int64_t>(std::floor(p.x / cell)),
          static_cast<std::int64_t>(std::floor(p.y / cell))};
    };
    for (int e = 0; e < static_cast<int>(loose.size()); ++e) {
      grid[key(loose[e].p)].push_back(e);
    }
    for (int e = 0; e < static_cast<int>(loose.size()); ++e) {
      const auto [gx, gy] = key(loose[e].p);
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = grid.find({gx + dx, gy + dy});
          if (it == grid.end()) continue;
          for (int f : it->second) {
            if (f <= e) continue;
            const int a = loose[e].node;
            const int b = loose[f].node;
            if (a == b) continue;
            const bool both_have_ids = has_node_ids(segments[order[a]]) &&
                                       has_node_ids(segments[order[b]]);
            if (both_have_ids) continue;
            if (squared_distance(loose[e].p, loose[f].p) <= tol2) {
              adjacency[a].push_back(b);
            }
          }
        }
      }
    }
  }
  return SegmentGraph(std::move(ids), adjacency);
}

std::string_view to_string(CentralityKind kind) {
  return kind == CentralityKind::kBetweenness ? "betweenness" : "closeness";
}

double CentralityScores::at(SegmentId id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) {
    throw Error(ErrorKind::kSchema,
                "no centrality score for segment " + std::to_string(id));
  }
  return values[it - ids.begin()];
}

CentralityScores centrality_scores(const SegmentGraph& graph,
                                   CentralityKind kind, Execution execution) {
  if (graph.empty()) throw Error(ErrorKind::kEmptyGraph, "graph has no nodes");
  CentralityScores scores;
  scores.kind = kind;
  scores.ids.assign(graph.ids().begin(), graph.ids().end());
  const bool parallel = execution == Execution::kParallel;
  if (kind == CentralityKind::kBetweenness) {
    scores.values = parallel ? kernels::betweenness_parallel(graph)
                             : kernels::betweenness_serial(graph);
    for (double& v : scores.values) v *= 0.5;
  } else {
    scores.values = parallel ? kernels::closeness_parallel(graph)
                             : kernels::closeness_serial(graph);
  }
  return scores;
}

}  // namespace sensorplace
