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

// Encoded regression rows x_{i,j} for (segment, time step) pairs.

#ifndef SENSORPLACE_MODEL_FEATURES_H_
#define SENSORPLACE_MODEL_FEATURES_H_

#include <compare>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensorplace/dataset.h"
#include "sensorplace/feature_space.h"

namespace sensorplace {

struct TimeStep {
  Date date;
  int hour = -1;

  friend bool operator==(const TimeStep&, const TimeStep&) = default;
  friend auto operator<=>(const TimeStep& a, const TimeStep& b) {
    if (auto c = a.date <=> b.date; c != 0) return c;
    return a.hour <=> b.hour;
  }
};

struct TrainingRows {
  Matrix features;
  std::vector<double> targets;
  std::vector<SegmentId> segments;  // per row
  std::vector<TimeStep> steps;      // per row
  std::size_t gaps = 0;             // requested (segment, date) pairs without data
};

// Row layout: static encodings, then temporal, then spatiotemporal, then the
// raw hour for hourly datasets. Static and spatiotemporal statistics are
// fitted on `fit_segments`; temporal statistics on the whole calendar.
// Holds a reference to `dataset`, which must outlive this object.
class ModelFeatures {
 public:
  ModelFeatures(const Dataset& dataset, std::span<const SegmentId> fit_segments);

  std::size_t width() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const Dataset& dataset() const { return *dataset_; }

  void encode(SegmentId segment, TimeStep step, std::span<double> out) const;
  Matrix rows(SegmentId segment, std::span<const TimeStep> steps) const;

  // Every observation of `segments`, in (segment, date, hour) order.
  TrainingRows observation_rows(std::span<const SegmentId> segments) const;
  // Every observation recorded on each (segment, date) entry; entries without
  // observations count as gaps.
  TrainingRows entry_rows(std::span<const std::pair<SegmentId, Date>> entries) const;

  // Distinct (date, hour) steps with at least one observation, ascending.
  const std::vector<TimeStep>& time_steps() const { return steps_; }

 private:
  void append(TrainingRows& out, const Observation& o, std::vector<double>& buf) const;

  const Dataset* dataset_;
  std::vector<std::string> names_;
  Matrix static_rows_;    // per segment index
  Matrix temporal_rows_;  // per calendar index; 0 columns when absent
  EncodingMap st_map_;
  std::vector<std::size_t> st_lookup_;
  std::unordered_map<std::uint64_t, std::size_t> st_index_;
  bool hourly_ = false;
  std::vector<TimeStep> steps_;
};

// Encoded static vectors x_i (rows aligned with `ids`) restricted to the
// columns of `subset`; statistics fitted on `fit_segments`.
Matrix encode_static_subset(const Dataset& dataset,
                            std::span<const SegmentId> fit_segments,
                            const FeatureSubsetSpec& subset,
                            std::span<const SegmentId> ids);

}  // namespace sensorplace

#endif  // SENSORPLACE_MODEL_FEATURES_H_
