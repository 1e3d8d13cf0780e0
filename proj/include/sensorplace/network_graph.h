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

// Segment adjacency graph and the two centrality scores used for
// ranking-based placement.

#ifndef SENSORPLACE_NETWORK_GRAPH_H_
#define SENSORPLACE_NETWORK_GRAPH_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sensorplace/common.h"

namespace sensorplace {

struct Segment {
  SegmentId id = 0;
  Point2 midpoint;
  // Intersection node ids. Preferred for adjacency when present.
  std::optional<std::int64_t> endpoint_a;
  std::optional<std::int64_t> endpoint_b;
  // Endpoint coordinates, used for snapping when node ids are absent.
  std::optional<Point2> endpoint_a_xy;
  std::optional<Point2> endpoint_b_xy;
  double length = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Undirected, loop-free segment graph in compressed sparse row form.
// Nodes are indexed 0..size()-1 in ascending segment-id order.
class SegmentGraph {
 public:
  SegmentGraph() = default;
  // `adjacency[i]` lists neighbor indices of node i. The constructor
  // symmetrizes, drops self-loops and duplicate edges.
  SegmentGraph(std::vector<SegmentId> ids,
               const std::vector<std::vector<int>>& adjacency);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t edge_count() const { return targets_.size() / 2; }

  std::span<const SegmentId> ids() const { return ids_; }
  SegmentId id(int index) const { return ids_[index]; }
  // Throws kSchema for unknown ids.
  int index_of(SegmentId id) const;
  bool contains(SegmentId id) const;

  std::span<const int> neighbors(int index) const {
    return {targets_.data() + offsets_[index],
            targets_.data() + offsets_[index + 1]};
  }
  std::vector<SegmentId> adjacent(SegmentId id) const;

  friend bool operator==(const SegmentGraph&, const SegmentGraph&) = default;

 private:
  std::vector<SegmentId> ids_;
  std::vector<int> offsets_{0};
  std::vector<int> targets_;
};

// Adjacency: shared endpoint node id, or, for segments lacking node ids,
// endpoint coordinates within `snap_tolerance` meters.
SegmentGraph build_segment_graph(std::span<const Segment> segments,
                                 double snap_tolerance = 0.5);

enum class CentralityKind { kBetweenness, kCloseness };

std::string_view to_string(CentralityKind kind);

struct CentralityScores {
  CentralityKind kind = CentralityKind::kBetweenness;
  std::vector<SegmentId> ids;  // ascending
  std::vector<double> values;  // aligned with ids

  double at(SegmentId id) const;
};

enum class Execution { kSerial, kParallel };

// Betweenness: unweighted shortest paths, each unordered {s,t} pair counted
// once, raw (unnormalized) sums. Closeness: (c-1)/sum of hop distances
// within the node's connected component of size c; singletons score 0.
CentralityScores centrality_scores(const SegmentGraph& graph,
                                   CentralityKind kind,
                                   Execution execution = Execution::kParallel);

namespace kernels {

// Brandes accumulation over all sources. Returns per-node sums over ordered
// (s,t) pairs; callers halve for the unordered convention.
std::vector<double> betweenness_serial(const SegmentGraph& graph);
// Same contract; sources processed in fixed-size blocks whose partial sums
// are reduced in block order, so the result does not depend on the thread
// count.
std::vector<double> betweenness_parallel(const SegmentGraph& graph);

std::vector<double> closeness_serial(const SegmentGraph& graph);
std::vector<double> closeness_parallel(const SegmentGraph& graph);

}  // namespace kernels

}  // namespace sensorplace

#endif  // SENSORPLACE_NETWORK_GRAPH_H_
