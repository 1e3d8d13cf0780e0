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

// Point-pattern dispersion (Clark-Evans) and bounded Voronoi cell areas with
// their Gini inequality.

#ifndef SENSORPLACE_SPATIAL_METRICS_H_
#define SENSORPLACE_SPATIAL_METRICS_H_

#include <optional>
#include <span>
#include <vector>

#include "sensorplace/common.h"

namespace sensorplace {

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Simple polygon in projected meters, stored counter-clockwise without a
// repeated closing vertex.
class StudyArea {
 public:
  // Throws kSchema if the ring has < 3 distinct vertices, self-intersects,
  // or has zero area. A trailing vertex equal to the first is dropped.
  explicit StudyArea(std::vector<Point2> ring);

  // Axis-aligned bounding box of `points` grown by `expand` of its extent on
  // every side.
  static StudyArea bounding_box_of(std::span<const Point2> points,
                                   double expand = 0.01);

  const std::vector<Point2>& ring() const { return ring_; }
  double area() const { return area_; }
  const BoundingBox& bounds() const { return bounds_; }
  // Inside or on the boundary.
  bool contains(Point2 p) const;

  friend bool operator==(const StudyArea&, const StudyArea&) = default;

 private:
  std::vector<Point2> ring_;
  double area_ = 0.0;
  BoundingBox bounds_;
};

struct DispersionStats {
  double r_obs = 0.0;
  double r_exp = 0.0;
  double ratio = 0.0;  // Clark-Evans R
};

// Mean distance from each point to its nearest other point. Needs >= 2
// points; coincident points contribute 0.
double mean_nearest_neighbor_distance(std::span<const Point2> points);

DispersionStats clark_evans(std::span<const Point2> points,
                            const StudyArea& area);

struct Site {
  SegmentId id = 0;
  Point2 location;
};

enum class VoronoiMethod { kRaster, kExact };

struct VoronoiPartition {
  std::vector<SegmentId> site_ids;  // input order
  std::vector<double> areas;        // aligned with site_ids
  double mean_area = 0.0;
  VoronoiMethod method = VoronoiMethod::kRaster;
  double resolution = 0.0;  // raster cell edge; 0 for exact
};

// sqrt(area)/cells_per_side; the default of 500 gives ~500x500 cells.
double default_resolution(const StudyArea& area, double cells_per_side = 500);

// Centers of the grid cells over the study area's bounding box whose center
// lies inside the polygon. Row-major from the bottom-left cell.
class RasterGrid {
 public:
  RasterGrid(const StudyArea& area, double resolution);

  double resolution() const { return resolution_; }
  double cell_area() const { return resolution_ * resolution_; }
  std::span<const Point2> cells() const { return cells_; }

 private:
  double resolution_;
  std::vector<Point2> cells_;
};

// Raster: each in-polygon cell goes to its nearest site, ties to the lowest
// site id; area = cell count * cell area. Exact: polygon clipped by the
// perpendicular bisectors. Sites must lie inside or on the boundary.
VoronoiPartition voronoi_areas(std::span<const Site> sites,
                               const StudyArea& area,
                               VoronoiMethod method = VoronoiMethod::kRaster,
                               std::optional<double> resolution = std::nullopt);

// G = sum_v sum_u |A_v - A_u| / (2 K^2 mean(A)).
double gini(std::span<const double> areas);

namespace kernels {

// Per-site cell counts for the nearest-site assignment. `sites` must be
// sorted by ascending id so the first minimum wins ties.
std::vector<long long> assign_cells_serial(std::span<const Point2> cells,
                                           std::span<const Site> sites);
std::vector<long long> assign_cells_parallel(std::span<const Point2> cells,
                                             std::span<const Site> sites);

}  // namespace kernels

}  // namespace sensorplace

#endif  // SENSORPLACE_SPATIAL_METRICS_H_
