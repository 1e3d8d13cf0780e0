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

#include "sensorplace/model_features.h"

#include <algorithm>

namespace sensorplace {

namespace {

FeatureTable rows_of(const FeatureTable& table, std::span<const std::size_t> indices) {
  FeatureTable out;
  out.columns = table.columns;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(table.rows[i]);
  return out;
}

std::uint64_t st_key(std::size_t segment_index, int calendar_index) {
  return (static_cast<std::uint64_t>(segment_index) << 32) |
         static_cast<std::uint32_t>(calendar_index);
}

std::vector<std::size_t> indices_of(const Dataset& ds, std::span<const SegmentId> ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (SegmentId id : ids) out.push_back(ds.segment_index(id));
  return out;
}

}  // namespace

ModelFeatures::ModelFeatures(const Dataset& ds, std::span<const SegmentId> fit_segments)
    : dataset_(&ds), hourly_(ds.hourly()) {
  if (fit_segments.empty()) {
    throw Error(ErrorKind::kFit, "model features need at least one fit segment");
  }
  const auto fit_idx = indices_of(ds, fit_segments);

  if (!ds.static_features.columns.empty()) {
    const EncodingMap map =
        fit_preprocessor(rows_of(ds.static_features, fit_idx), ds.schema, ds.static_features.columns);
    static_rows_ = transform(ds.static_features, map);
    for (auto& n : map.encoded_names()) names_.push_back(n);
  } else {
    static_rows_ = Matrix(ds.segments.size(), 0);
  }

  if (!ds.temporal_features.columns.empty() && !ds.temporal_features.rows.empty()) {
    const EncodingMap map =
        fit_preprocessor(ds.temporal_features, ds.schema, ds.temporal_features.columns);
    temporal_rows_ = transform(ds.temporal_features, map);
    for (auto& n : map.encoded_names()) names_.push_back(n);
  }

  if (!ds.spatiotemporal_features.columns.empty()) {
    std::vector<bool> is_fit(ds.segments.size(), false);
    for (std::size_t i : fit_idx) is_fit[i] = true;
    std::vector<std::size_t> fit_rows;
    for (std::size_t r = 0; r < ds.spatiotemporal_keys.size(); ++r) {
      const auto& [id, date] = ds.spatiotemporal_keys[r];
      const std::size_t si = ds.segment_index(id);
      if (is_fit[si]) fit_rows.push_back(r);
      st_index_.emplace(st_key(si, ds.calendar.index_of(date)), r);
    }
    if (fit_rows.empty()) {
      for (std::size_t r = 0; r < ds.spatiotemporal_keys.size(); ++r) fit_rows.push_back(r);
    }
    if (!fit_rows.empty()) {
      st_map_ = fit_preprocessor(rows_of(ds.spatiotemporal_features, fit_rows), ds.schema,
                                 ds.spatiotemporal_features.columns);
      st_lookup_ = st_map_.bind(ds.spatiotemporal_features.columns);
      for (auto& n : st_map_.encoded_names()) names_.push_back(n);
    }
  }
  if (hourly_) names_.push_back("hour");

  for (const Observation& o : ds.observations) steps_.push_back({o.date, o.hour});
  std::sort(steps_.begin(), steps_.end());
  steps_.erase(std::unique(steps_.begin(), steps_.end()), steps_.end());
}

void ModelFeatures::encode(SegmentId segment, TimeStep step, std::span<double> out) const {
  if (out.size() != width()) {
    throw Error(ErrorKind::kShape, "feature row buffer has the wrong width");
  }
  const Dataset& ds = *dataset_;
  const std::size_t si = ds.segment_index(segment);
  std::size_t pos = 0;
  for (double v : static_rows_.row(si)) out[pos++] = v;
  const int ci = ds.calendar.index_of(step.date);
  if (temporal_rows_.cols() > 0) {
    if (ci >= 0 && static_cast<std::size_t>(ci) < temporal_rows_.rows()) {
      for (double v : temporal_rows_.row(static_cast<std::size_t>(ci))) out[pos++] = v;
    } else {
      for (std::size_t k = 0; k < temporal_rows_.cols(); ++k) out[pos++] = 0.0;
    }
  }
  if (st_map_.width() > 0) {
    auto span = out.subspan(pos, st_map_.width());
    auto it = ci >= 0 ? st_index_.find(st_key(si, ci)) : st_index_.end();
    if (it != st_index_.end()) {
      st_map_.encode(ds.spatiotemporal_features.rows[it->second], st_lookup_, span);
    } else {
      std::fill(span.begin(), span.end(), 0.0);
    }
    pos += st_map_.width();
  }
  if (hourly_) out[pos++] = static_cast<double>(std::max(step.hour, 0));
}

Matrix ModelFeatures::rows(SegmentId segment, std::span<const TimeStep> steps) const {
  Matrix m(steps.size(), width());
  for (std::size_t r = 0; r < steps.size(); ++r) encode(segment, steps[r], m.row(r));
  return m;
}

void ModelFeatures::append(TrainingRows& out, const Observation& o,
                           std::vector<double>& buf) const {
  encode(o.segment, {o.date, o.hour}, buf);
  out.features.append_row(buf);
  out.targets.push_back(static_cast<double>(o.count));
  out.segments.push_back(o.segment);
  out.steps.push_back({o.date, o.hour});
}

TrainingRows ModelFeatures::observation_rows(std::span<const SegmentId> segments) const {
  TrainingRows out;
  out.features = Matrix(0, width());
  std::vector<SegmentId> sorted(segments.begin(), segments.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t total = 0;
  for (SegmentId id : sorted) total += dataset_->observations_of(id).size();
  out.features.reserve_rows(total);
  std::vector<double> buf(width());
  for (SegmentId id : sorted) {
    for (const Observation& o : dataset_->observations_of(id)) append(out, o, buf);
  }
  return out;
}

TrainingRows ModelFeatures::entry_rows(
    std::span<const std::pair<SegmentId, Date>> entries) const {
  TrainingRows out;
  out.features = Matrix(0, width());
  std::vector<double> buf(width());
  for (const auto& [id, date] : entries) {
    const auto obs = dataset_->observations_of(id);
    auto lo = std::lower_bound(obs.begin(), obs.end(), date,
                               [](const Observation& o, Date d) { return o.date < d; });
    bool any = false;
    for (auto it = lo; it != obs.end() && it->date == date; ++it) {
      append(out, *it, buf);
      any = true;
    }
    if (!any) ++out.gaps;
  }
  return out;
}

Matrix encode_static_subset(const Dataset& ds, std::span<const SegmentId> fit_segments,
                            const FeatureSubsetSpec& subset, std::span<const SegmentId> ids) {
  if (fit_segments.empty()) {
    throw Error(ErrorKind::kFit, "static encoding needs at least one fit segment");
  }
  const auto columns = resolve_feature_subset(subset, ds.schema);
  const auto fit_idx = indices_of(ds, fit_segments);
  const EncodingMap map = fit_preprocessor(rows_of(ds.static_features, fit_idx), ds.schema, columns);
  const auto out_idx = indices_of(ds, ids);
  return transform(rows_of(ds.static_features, out_idx), map);
}

}  // namespace sensorplace
