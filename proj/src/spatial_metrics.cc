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

#include "sensorplace/spatial_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sensorplace {

namespace {

double signed_area(const std::vector<Point2>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const Point2& p = ring[i];
    const Point2& q = ring[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2 p, Point2 a, Point2 b, double eps) {
  if (std::abs(cross(a, b, p)) > eps * std::max(1.0, std::sqrt(squared_distance(a, b)))) {
    return false;
  }
  return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps &&
         p.y >= std::min(a.y, b.y) - eps && p.y <= std::max(a.y, b.y) + eps;
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto within = [](Point2 p, Point2 q, Point2 r) {
    return r.x >= std::min(p.x, q.x) && r.x <= std::max(p.x, q.x) &&
           r.y >= std::min(p.y, q.y) && r.y <= std::max(p.y, q.y);
  };
  if (d1 == 0 && within(c, d, a)) return true;
  if (d2 == 0 && within(c, d, b)) return true;
  if (d3 == 0 && within(a, b, c)) return true;
  if (d4 == 0 && within(a, b, d)) return true;
  return false;
}

// Keeps the part of `poly` closer to `site` than to `other`.
std::vector<Point2> clip_to_bisector(const std::vector<Point2>& poly,
                                     Point2 site, Point2 other) {
  const Point2 mid{0.5 * (site.x + other.x), 0.5 * (site.y + other.y)};
  const Point2 dir{other.x - site.x, other.y - site.y};
  auto side = [&](Point2 p) {
    return (p.x - mid.x) * dir.x + (p.y - mid.y) * dir.y;
  };
  std::vector<Point2> out;
  out.reserve(poly.size() + 2);
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 p = poly[i];
    const Point2 q = poly[(i + 1) % n];
    const double sp = side(p);
    const double sq = side(q);
    if (sp <= 0) out.push_back(p);
    if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) {
      const double t = sp / (sp - sq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

}  // namespace

StudyArea::StudyArea(std::vector<Point2> ring) : ring_(std::move(ring)) {
  if (ring_.size() >= 2 && ring_.front() == ring_.back()) ring_.pop_back();
  if (ring_.size() < 3) {
    throw Error(ErrorKind::kSchema, "study area ring needs >= 3 vertices");
  }
  for (const Point2& p : ring_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kSchema, "study area has non-finite vertex");
    }
  }
  const double a = signed_area(ring_);
  if (a < 0) std::reverse(ring_.begin(), ring_.end());
  area_ = std::abs(a);
  if (!(area_ > 0)) throw Error(ErrorKind::kSchema, "study area has zero area");

  const std::size_t n = ring_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(ring_[i], ring_[(i + 1) % n], ring_[j],
                             ring_[(j + 1) % n])) {
        throw Error(ErrorKind::kSchema, "study area ring self-intersects");
      }
    }
  }
  bounds_ = {ring_[0].x, ring_[0].y, ring_[0].x, ring_[0].y};
  for (const Point2& p : ring_) {
    bounds_.min_x = std::min(bounds_.min_x, p.x);
    bounds_.min_y = std::min(bounds_.min_y, p.y);
    bounds_.max_x = std::max(bounds_.max_x, p.x);
    bounds_.max_y = std::max(bounds_.max_y, p.y);
  }
}

StudyArea StudyArea::bounding_box_of(std::span<const Point2> points,
                                     double expand) {
  if (points.empty()) {
    throw Error(ErrorKind::kSchema, "cannot bound an empty point set");
  }
  BoundingBox b{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const Point2& p : points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  // Degenerate extents still get a positive-area box.
  const double dx = std::max(b.width() * expand, 1.0);
  const double dy = std::max(b.height() * expand, 1.0);
  return StudyArea({{b.min_x - dx, b.min_y - dy},
                    {b.max_x + dx, b.min_y - dy},
                    {b.max_x + dx, b.max_y + dy},
                    {b.min_x - dx, b.max_y + dy}});
}

bool StudyArea::contains(Point2 p) const {
  const double eps =
      1e-9 * std::max({1.0, bounds_.width(), bounds_.height()});
  bool inside = false;
  for (std::size_t i = 0, n = ring_.size(); i < n; ++i) {
    const Point2& a = ring_[i];
    const Point2& b = ring_[(i + 1) % n];
    if (on_segment(p, a, b, eps)) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double mean_nearest_neighbor_distance(std::span<const Point2> points) {
  const std::size_t k = points.size();
  if (k < 2) {
    throw Error(ErrorKind::kArity,
                "nearest-neighbor distance needs at least 2 points");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) best = std::min(best, squared_distance(points[i], points[j]));
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(k);
}

DispersionStats clark_evans(std::span<const Point2> points,
                            const StudyArea& area) {
  DispersionStats s;
  s.r_obs = mean_nearest_neighbor_distance(points);
  const double density = static_cast<double>(points.size()) / area.area();
  s.r_exp = 1.0 / (2.0 * std::sqrt(density));
  s.ratio = s.r_obs / s.r_exp;
  return s;
}

double default_resolution(const StudyArea& area, double cells_per_side) {
  return std::sqrt(area.area()) / cells_per_side;
}

RasterGrid::RasterGrid(const StudyArea& area, double resolution)
    : resolution_(resolution) {
  if (!(resolution > 0) || !std::isfinite(resolution)) {
    throw Error(ErrorKind::kParameter, "raster resolution must be > 0");
  }
  const BoundingBox& b = area.bounds();
  const auto nx = static_cast<long long>(std::ceil(b.width() / resolution));
  const auto ny = static_cast<long long>(std::ceil(b.height() / resolution));
  const auto& ring = area.ring();
  std::vector<double> crossings;
  for (long long j = 0; j < ny; ++j) {
    const double y = b.min_y + (static_cast<double>(j) + 0.5) * resolution;
    crossings.clear();
    for (std::size_t e = 0, n = ring.size(); e < n; ++e) {
      const Point2& p = ring[e];
      const Point2& q = ring[(e + 1) % n];
      if ((p.y <= y) != (q.y <= y)) {
        crossings.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    std::size_t next = 0;
    bool inside = false;
    for (long long i = 0; i < nx; ++i) {
      const double x = b.min_x + (static_cast<double>(i) + 0.5) * resolution;
      while (next < crossings.size() && crossings[next] <= x) {
        inside = !inside;
        ++next;
      }
      if (inside) cells_.push_back({x, y});
    }
  }
}

namespace kernels {

namespace {

inline std::size_t nearest_site(Point2 c, std::span<const Site> sites) {
  std::size_t best = 0;
  double best_d = squared_distance(c, sites[0].location);
  for (std::size_t s = 1; s < sites.size(); ++s) {
    const double d = squared_distance(c, sites[s].location);
    if (d < best_d) {
      best_d = d;
      best = s;
    }
  }
  return best;
}

}  // namespace

std::vector<long long> assign_cells_serial(std::span<const Point2> cells,
                                           std::span<const Site> sites) {
  std::vector<long long> counts(sites.size(), 0);
  for (const Point2& c : cells) ++counts[nearest_site(c, sites)];
  return counts;
}

std::vector<long long> assign_cells_parallel(std::span<const Point2> cells,
                                             std::span<const Site> sites) {
  const std::size_t k = sites.size();
  std::vector<long long> counts(k, 0);
  const long long n = static_cast<long long>(cells.size());
#pragma omp parallel
  {
    std::vector<long long> local(k, 0);
#pragma omp for schedule(static)
    for (long long i = 0; i < n; ++i) ++local[nearest_site(cells[i], sites)];
#pragma omp critical
    for (std::size_t s = 0; s < k; ++s) counts[s] += local[s];
  }
  return counts;
}

}  // namespace kernels

VoronoiPartition voronoi_areas(std::span<const Site> sites,
                               const StudyArea& area, VoronoiMethod method,
                               std::optional<double> resolution) {
  if (sites.empty()) {
    throw Error(ErrorKind::kArity, "Voronoi partition needs at least 1 site");
  }
  for (const Site& s : sites) {
    if (!area.contains(s.location)) {
      throw Error(ErrorKind::kParameter,
                  "site " + std::to_string(s.id) + " lies outside the study area");
    }
  }
  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sites[a].id < sites[b].id;
  });
  std::vector<Site> sorted;
  sorted.reserve(sites.size());
  for (std::size_t k : order) sorted.push_back(sites[k]);

  VoronoiPartition part;
  part.method = method;
  part.site_ids.reserve(sites.size());
  for (const Site& s : sites) part.site_ids.push_back(s.id);
  part.areas.assign(sites.size(), 0.0);

  if (method == VoronoiMethod::kRaster) {
    const double res = resolution.value_or(default_resolution(area));
    if (!(res > 0)) {
      throw Error(ErrorKind::kParameter, "raster resolution must be > 0");
    }
    RasterGrid grid(area, res);
    part.resolution = res;
    auto counts = kernels::assign_cells_parallel(grid.cells(), sorted);
    for (std::size_t r = 0; r < order.size(); ++r) {
      part.areas[order[r]] = static_cast<double>(counts[r]) * grid.cell_area();
    }
  } else {
    for (std::size_t r = 0; r < sorted.size(); ++r) {
      std::vector<Point2> cell = area.ring();
      for (std::size_t q = 0; q < sorted.size() && !cell.empty(); ++q) {
        if (q == r) continue;
        if (sorted[q].location == sorted[r].location) {
          // Coincident sites: the lower id keeps the whole shared cell.
          if (q < r) cell.clear();
          continue;
        }
        cell = clip_to_bisector(cell, sorted[r].location, sorted[q].location);
      }
      part.areas[order[r]] = cell.size() < 3 ? 0.0 : std::abs(signed_area(cell));
    }
  }
  part.mean_area =
      std::accumulate(part.areas.begin(), part.areas.end(), 0.0) /
      static_cast<double>(part.areas.size());
  return part;
}

double gini(std::span<const double> areas) {
  if (areas.empty()) throw Error(ErrorKind::kArity, "Gini of an empty set");
  std::vector<double> sorted(areas.begin(), areas.end());
  for (double a : sorted) {
    if (!(a >= 0) || !std::isfinite(a)) {
      throw Error(ErrorKind::kParameter, "areas must be finite and >= 0");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double k = static_cast<double>(sorted.size());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (!(total > 0)) throw Error(ErrorKind::kUndefined, "all areas are zero");
  // sum_v sum_u |a_v - a_u| = 2 * sum_i (2i - K + 1) a_(i) for ascending a.
  double weighted = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i) - k + 1.0) * sorted[i];
  }
  const double mean = total / k;
  return 2.0 * weighted / (2.0 * k * k * mean);
}

}  // namespace sensorplace
