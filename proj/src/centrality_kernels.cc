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

#include <algorithm>
#include <vector>

#include "sensorplace/network_graph.h"

namespace sensorplace::kernels {

namespace {

constexpr int kSourceBlock = 32;

// Scratch buffers for one single-source pass, reused across sources.
struct BrandesScratch {
  explicit BrandesScratch(std::size_t n)
      : dist(n, -1), sigma(n, 0.0), delta(n, 0.0) {
    order.reserve(n);
  }
  std::vector<int> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<int> order;
};

void accumulate_source(const SegmentGraph& g, int s, BrandesScratch& w,
                       std::vector<double>& out) {
  w.order.clear();
  w.dist[s] = 0;
  w.sigma[s] = 1.0;
  w.order.push_back(s);
  for (std::size_t head = 0; head < w.order.size(); ++head) {
    const int v = w.order[head];
    for (int u : g.neighbors(v)) {
      if (w.dist[u] < 0) {
        w.dist[u] = w.dist[v] + 1;
        w.order.push_back(u);
      }
      if (w.dist[u] == w.dist[v] + 1) w.sigma[u] += w.sigma[v];
    }
  }
  // Dependencies in reverse BFS order; predecessors are recovered from
  // distances instead of stored lists.
  for (auto it = w.order.rbegin(); it != w.order.rend(); ++it) {
    const int v = *it;
    for (int u : g.neighbors(v)) {
      if (w.dist[u] == w.dist[v] + 1) {
        w.delta[v] += w.sigma[v] / w.sigma[u] * (1.0 + w.delta[u]);
      }
    }
    if (v != s) out[v] += w.delta[v];
  }
  for (int v : w.order) {
    w.dist[v] = -1;
    w.sigma[v] = 0.0;
    w.delta[v] = 0.0;
  }
}

// Sum of hop distances and reached-node count from s.
std::pair<double, int> bfs_distance_sum(const SegmentGraph& g, int s,
                                        std::vector<int>& dist,
                                        std::vector<int>& queue) {
  queue.clear();
  dist[s] = 0;
  queue.push_back(s);
  double total = 0.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    total += dist[v];
    for (int u : g.neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  for (int v : queue) dist[v] = -1;
  return {total, static_cast<int>(queue.size())};
}

double closeness_value(double total, int reached) {
  if (reached <= 1 || total <= 0.0) return 0.0;
  return static_cast<double>(reached - 1) / total;
}

}  // namespace

std::vector<double> betweenness_serial(const SegmentGraph& graph) {
  const int n = static_cast<int>(graph.size());
  std::vector<double> out(n, 0.0);
  BrandesScratch scratch(n);
  for (int s = 0; s < n; ++s) accumulate_source(graph, s, scratch, out);
  return out;
}

std::vector<double> betweenness_parallel(const SegmentGraph& graph) {
  const int n = static_cast<int>(graph.size());
  const int blocks = (n + kSourceBlock - 1) / kSourceBlock;
  std::vector<std::vector<double>> partial(blocks);
#pragma omp parallel
  {
    BrandesScratch scratch(n);
#pragma omp for schedule(dynamic, 1)
    for (int b = 0; b < blocks; ++b) {
      partial[b].assign(n, 0.0);
      const int end = std::min(n, (b + 1) * kSourceBlock);
      for (int s = b * kSourceBlock; s < end; ++s) {
        accumulate_source(graph, s, scratch, partial[b]);
      }
    }
  }
  std::vector<double> out(n, 0.0);
  for (const auto& block : partial) {
    for (int v = 0; v < n; ++v) out[v] += block[v];
  }
  return out;
}

std::vector<double> closeness_serial(const SegmentGraph& graph) {
  const int n = static_cast<int>(graph.size());
  std::vector<double> out(n, 0.0);
  std::vector<int> dist(n, -1);
  std::vector<int> queue;
  queue.reserve(n);
  for (int s = 0; s < n; ++s) {
    auto [total, reached] = bfs_distance_sum(graph, s, dist, queue);
    out[s] = closeness_value(total, reached);
  }
  return out;
}

std::vector<double> closeness_parallel(const SegmentGraph& graph) {
  const int n = static_cast<int>(graph.size());
  std::vector<double> out(n, 0.0);
#pragma omp parallel
  {
    std::vector<int> dist(n, -1);
    std::vector<int> queue;
    queue.reserve(n);
#pragma omp for schedule(dynamic, 16)
    for (int s = 0; s < n; ++s) {
      auto [total, reached] = bfs_distance_sum(graph, s, dist, queue);
      out[s] = closeness_value(total, reached);
    }
  }
  return out;
}

}  // namespace sensorplace::kernels
