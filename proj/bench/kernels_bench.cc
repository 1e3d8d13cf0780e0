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

// Serial reference kernels against their OpenMP counterparts. The argument
// is the grid side of a synthetic city (graph kernels) or the raster side
// (cell assignment).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sensorplace/dataset.h"
#include "sensorplace/network_graph.h"
#include "sensorplace/spatial_metrics.h"

namespace sp = sensorplace;

namespace {

sp::SegmentGraph grid_graph(int side) {
  sp::SyntheticCityConfig c;
  c.width = side;
  c.height = side;
  c.n_days = 7;
  return sp::generate_synthetic_city(c).first.graph;
}

template <std::vector<double> (*Kernel)(const sp::SegmentGraph&)>
void graph_kernel(benchmark::State& state) {
  const sp::SegmentGraph g = grid_graph(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(g));
  state.counters["nodes"] = static_cast<double>(g.size());
}

struct RasterCase {
  std::vector<sp::Point2> cells;
  std::vector<sp::Site> sites;
};

RasterCase raster_case(int side, int n_sites) {
  const sp::StudyArea area({{0, 0}, {1000, 0}, {1000, 1000}, {0, 1000}});
  const sp::RasterGrid grid(area, 1000.0 / side);
  RasterCase rc;
  rc.cells.assign(grid.cells().begin(), grid.cells().end());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < n_sites; ++i) rc.sites.push_back({i + 1, {u(rng), u(rng)}});
  return rc;
}

template <std::vector<long long> (*Kernel)(std::span<const sp::Point2>,
                                           std::span<const sp::Site>)>
void assign_kernel(benchmark::State& state) {
  const RasterCase rc = raster_case(static_cast<int>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(rc.cells, rc.sites));
  state.counters["cells"] = static_cast<double>(rc.cells.size());
}

}  // namespace

BENCHMARK(graph_kernel<sp::kernels::betweenness_serial>)
    ->Name("betweenness/serial")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(graph_kernel<sp::kernels::betweenness_parallel>)
    ->Name("betweenness/parallel")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(graph_kernel<sp::kernels::closeness_serial>)
    ->Name("closeness/serial")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(graph_kernel<sp::kernels::closeness_parallel>)
    ->Name("closeness/parallel")->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(assign_kernel<sp::kernels::assign_cells_serial>)
    ->Name("assign_cells/serial")->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(assign_kernel<sp::kernels::assign_cells_parallel>)
    ->Name("assign_cells/parallel")->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
