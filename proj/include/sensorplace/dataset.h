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

// Dataset bundles: loading, validation, outlier filtering, segment splits
// and the synthetic city generator.
//
// Bundle layout (CSV with header rows, ISO dates, planar meters):
//   segments.csv                 segment_id,midpoint_x,midpoint_y,endpoint_a,endpoint_b
//                                [,endpoint_a_x,endpoint_a_y,endpoint_b_x,endpoint_b_y][,length]
//   static_features.csv          segment_id,<static columns>
//   observations.csv             segment_id,date[,hour],count
//   boundary.json                [[x,y],...] ring (or a one-element array of rings)
//   schema.json                  {"columns":[{"name","kind","variability"}]}  (optional)
//   temporal_features.csv        date,<temporal columns>                      (optional)
//   spatiotemporal_features.csv  segment_id,date,<columns>                    (optional)
//   existing_sensors.csv         segment_id                                   (optional)

#ifndef SENSORPLACE_DATASET_H_
#define SENSORPLACE_DATASET_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sensorplace/calendar.h"
#include "sensorplace/common.h"
#include "sensorplace/feature_space.h"
#include "sensorplace/network_graph.h"
#include "sensorplace/spatial_metrics.h"

namespace sensorplace {

struct Observation {
  SegmentId segment = 0;
  Date date;
  int hour = -1;  // -1 for daily data
  std::int64_t count = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
  friend auto operator<=>(const Observation& a, const Observation& b) {
    if (auto c = a.segment <=> b.segment; c != 0) return c;
    if (auto c = a.date <=> b.date; c != 0) return c;
    if (auto c = a.hour <=> b.hour; c != 0) return c;
    return a.count <=> b.count;
  }
};

struct Dataset {
  std::string name;
  std::vector<Segment> segments;  // ascending id
  SegmentGraph graph;
  FeatureSchema schema;
  // One row per segment, aligned with `segments`. Missing rows are all-missing.
  FeatureTable static_features;
  // One row per calendar date, aligned with `calendar.dates()`; no rows when
  // the bundle has no temporal file.
  FeatureTable temporal_features;
  // Sparse (segment, date) rows.
  FeatureTable spatiotemporal_features;
  std::vector<std::pair<SegmentId, Date>> spatiotemporal_keys;
  // Sorted by (segment, date, hour).
  std::vector<Observation> observations;
  std::optional<StudyArea> study_area;
  bool boundary_inferred = false;  // bounding box fallback was used
  Calendar calendar;
  std::vector<SegmentId> existing_sensors;

  std::size_t segment_index(SegmentId id) const;  // throws kIntegrity
  const Segment& segment(SegmentId id) const { return segments[segment_index(id)]; }
  std::vector<SegmentId> segment_ids() const;
  bool hourly() const;
  const StudyArea& area() const;

  // Observations of one segment, sorted by (date, hour).
  std::span<const Observation> observations_of(SegmentId id) const;

  // Sorts observations and rebuilds the per-segment index. Called by every
  // constructor path; call again after editing observations by hand.
  void reindex();

  // Compares content; `name` is ignored.
  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<std::size_t> observation_offsets_;
};

// Throws kBundle (missing file), kIntegrity (unknown references, with row
// numbers), kParse (malformed values) or kSchema.
Dataset load_dataset(const std::filesystem::path& bundle);
void save_dataset(const Dataset& dataset, const std::filesystem::path& bundle);

struct OutlierReport {
  double k_sigma = 3.0;
  std::vector<Observation> removed;
  std::size_t total = 0;
  double removal_fraction = 0.0;

  nlohmann::json to_json() const;
};

// Per segment: drops observations with |count - mean| > k_sigma * sd (sample
// sd). Segments with < 2 observations or sd == 0 are untouched.
std::pair<Dataset, OutlierReport> filter_outliers(const Dataset& dataset,
                                                  double k_sigma = 3.0);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct SplitAssignment {
  std::vector<SegmentId> train;  // ascending
  std::vector<SegmentId> val;
  std::vector<SegmentId> test;
  SplitFractions fractions;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Seeded shuffle; |val| = max(1, floor(val*N)), |test| likewise, the rest to
// train. `pinned_train` ids (e.g. existing sensors) always land in train.
SplitAssignment split_segments(std::span<const SegmentId> ids,
                               SplitFractions fractions, std::uint64_t seed,
                               std::span<const SegmentId> pinned_train = {});
SplitAssignment split_segments(const Dataset& dataset, SplitFractions fractions,
                               std::uint64_t seed, bool pin_existing = true);

struct SyntheticCityConfig {
  int width = 20;   // intersections per row
  int height = 20;  // intersections per column
  int n_days = 180;
  double noise_scale = 0.3;  // sd of the per-(segment, day) log-noise
  std::uint64_t seed = 0;
  double spacing = 100.0;  // meters between intersections
  int hotspots = 6;
  std::string start_date = "2023-01-02";

  nlohmann::json to_json() const;
  static SyntheticCityConfig from_json(const nlohmann::json& doc);
};

struct Hotspot {
  Point2 center;
  double amplitude = 0.0;
  double sigma = 0.0;
};

// Generating parameters of a synthetic city. expected(s, d) is the rounded
// noise-free count of segment index s on day d.
struct SyntheticTruth {
  std::vector<Hotspot> hotspots;
  double intercept = 0.0;
  Matrix log_mean;  // segments x days
  Matrix expected;  // segments x days, rounded exp(log_mean)
};

// Grid street network with log-link traffic: smooth hotspot field at the
// midpoint + street attributes + weekday and temperature effects, times
// seeded log-normal noise.
std::pair<Dataset, SyntheticTruth> generate_synthetic_city(
    const SyntheticCityConfig& config);

}  // namespace sensorplace

#endif  // SENSORPLACE_DATASET_H_
