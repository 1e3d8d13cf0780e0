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

#include "sensorplace/dataset.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

#include "csv.h"

namespace sensorplace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Dataset

std::size_t Dataset::segment_index(SegmentId id) const {
  auto it = std::lower_bound(segments.begin(), segments.end(), id,
                             [](const Segment& s, SegmentId v) { return s.id < v; });
  if (it == segments.end() || it->id != id) {
    throw Error(ErrorKind::kIntegrity, "unknown segment " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - segments.begin());
}

std::vector<SegmentId> Dataset::segment_ids() const {
  std::vector<SegmentId> ids;
  ids.reserve(segments.size());
  for (const Segment& s : segments) ids.push_back(s.id);
  return ids;
}

bool Dataset::hourly() const {
  return std::any_of(observations.begin(), observations.end(),
                     [](const Observation& o) { return o.hour >= 0; });
}

const StudyArea& Dataset::area() const {
  if (!study_area) throw Error(ErrorKind::kConfiguration, "dataset has no study area");
  return *study_area;
}

std::span<const Observation> Dataset::observations_of(SegmentId id) const {
  const std::size_t i = segment_index(id);
  if (observation_offsets_.size() != segments.size() + 1) {
    throw Error(ErrorKind::kIntegrity, "dataset observations are not indexed");
  }
  return std::span<const Observation>(observations)
      .subspan(observation_offsets_[i], observation_offsets_[i + 1] - observation_offsets_[i]);
}

void Dataset::reindex() {
  std::sort(observations.begin(), observations.end());
  observation_offsets_.assign(segments.size() + 1, 0);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    observation_offsets_[i] = pos;
    while (pos < observations.size() && observations[pos].segment == segments[i].id) ++pos;
    if (pos < observations.size() && observations[pos].segment < segments[i].id) {
      throw Error(ErrorKind::kIntegrity, "observation references unknown segment " +
                                             std::to_string(observations[pos].segment));
    }
  }
  if (pos != observations.size()) {
    throw Error(ErrorKind::kIntegrity, "observation references unknown segment " +
                                           std::to_string(observations[pos].segment));
  }
  observation_offsets_[segments.size()] = pos;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.segments == b.segments && a.graph == b.graph && a.schema == b.schema &&
         a.static_features == b.static_features &&
         a.temporal_features == b.temporal_features &&
         a.spatiotemporal_features == b.spatiotemporal_features &&
         a.spatiotemporal_keys == b.spatiotemporal_keys &&
         a.observations == b.observations && a.study_area == b.study_area &&
         a.boundary_inferred == b.boundary_inferred && a.calendar == b.calendar &&
         a.existing_sensors == b.existing_sensors;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string where(const csv::Table& t, std::size_t row) {
  // +2: one for the header, one for 1-based numbering.
  return t.source.filename().string() + " row " + std::to_string(row + 2);
}

SegmentId parse_id(const csv::Table& t, std::size_t row, std::size_t col) {
  auto v = csv::to_int(t.rows[row][col]);
  if (!v) {
    throw Error(ErrorKind::kParse, where(t, row) + ": invalid " + t.header[col] + " '" +
                                       t.rows[row][col] + "'");
  }
  return *v;
}

double parse_real(const csv::Table& t, std::size_t row, std::size_t col) {
  auto v = csv::to_double(t.rows[row][col]);
  if (!v) {
    throw Error(ErrorKind::kParse, where(t, row) + ": invalid " + t.header[col] + " '" +
                                       t.rows[row][col] + "'");
  }
  return *v;
}

Date parse_row_date(const csv::Table& t, std::size_t row, std::size_t col) {
  try {
    return parse_date(t.rows[row][col]);
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse, where(t, row) + ": " + e.what());
  }
}

std::vector<Segment> read_segments(const fs::path& path) {
  const csv::Table t = csv::read(path);
  const std::size_t c_id = t.require("segment_id");
  const std::size_t c_x = t.require("midpoint_x");
  const std::size_t c_y = t.require("midpoint_y");
  const auto c_a = t.column("endpoint_a");
  const auto c_b = t.column("endpoint_b");
  const auto c_ax = t.column("endpoint_a_x");
  const auto c_ay = t.column("endpoint_a_y");
  const auto c_bx = t.column("endpoint_b_x");
  const auto c_by = t.column("endpoint_b_y");
  const auto c_len = t.column("length");
  auto opt_id = [&](std::size_t r, std::optional<std::size_t> c) -> std::optional<std::int64_t> {
    if (!c || t.rows[r][*c].empty()) return std::nullopt;
    return parse_id(t, r, *c);
  };
  auto opt_xy = [&](std::size_t r, std::optional<std::size_t> cx,
                    std::optional<std::size_t> cy) -> std::optional<Point2> {
    if (!cx || !cy || t.rows[r][*cx].empty() || t.rows[r][*cy].empty()) return std::nullopt;
    return Point2{parse_real(t, r, *cx), parse_real(t, r, *cy)};
  };
  std::vector<Segment> segments;
  segments.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Segment s;
    s.id = parse_id(t, r, c_id);
    s.midpoint = {parse_real(t, r, c_x), parse_real(t, r, c_y)};
    s.endpoint_a = opt_id(r, c_a);
    s.endpoint_b = opt_id(r, c_b);
    s.endpoint_a_xy = opt_xy(r, c_ax, c_ay);
    s.endpoint_b_xy = opt_xy(r, c_bx, c_by);
    if (c_len && !t.rows[r][*c_len].empty()) s.length = parse_real(t, r, *c_len);
    segments.push_back(s);
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].id == segments[i - 1].id) {
      throw Error(ErrorKind::kSchema,
                  "segments.csv: duplicate segment id " + std::to_string(segments[i].id));
    }
  }
  return segments;
}

// Feature columns of `t` after the first `key_columns` cells.
std::vector<std::string> feature_columns(const csv::Table& t, std::size_t key_columns) {
  return {t.header.begin() + static_cast<std::ptrdiff_t>(key_columns), t.header.end()};
}

void infer_columns(const csv::Table& t, std::size_t key_columns, Variability variability,
                   std::vector<ColumnSpec>& out) {
  for (std::size_t c = key_columns; c < t.header.size(); ++c) {
    bool numeric = true;
    for (const auto& row : t.rows) {
      if (!row[c].empty() && !csv::to_double(row[c])) {
        numeric = false;
        break;
      }
    }
    out.push_back({t.header[c], numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical,
                   variability});
  }
}

void check_columns(const csv::Table& t, std::size_t key_columns, const FeatureSchema& schema,
                   Variability variability) {
  const auto cols = feature_columns(t, key_columns);
  for (const std::string& name : cols) {
    const ColumnSpec* spec = schema.find(name);
    if (spec == nullptr || spec->variability != variability) {
      throw Error(ErrorKind::kSchema, t.source.filename().string() + ": column '" + name +
                                          "' is not a " + std::string(to_string(variability)) +
                                          " column of schema.json");
    }
  }
  for (const std::string& name : schema.names(variability)) {
    if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
      throw Error(ErrorKind::kSchema, t.source.filename().string() + ": schema column '" +
                                          name + "' is missing");
    }
  }
}

std::vector<FeatureValue> parse_feature_row(const csv::Table& t, std::size_t row,
                                            std::size_t key_columns,
                                            const FeatureSchema& schema) {
  std::vector<FeatureValue> values;
  values.reserve(t.header.size() - key_columns);
  for (std::size_t c = key_columns; c < t.header.size(); ++c) {
    const std::string& cell = t.rows[row][c];
    if (cell.empty()) {
      values.emplace_back(std::monostate{});
    } else if (schema.find(t.header[c])->kind == ColumnKind::kNumeric) {
      values.emplace_back(parse_real(t, row, c));
    } else {
      values.emplace_back(cell);
    }
  }
  return values;
}

StudyArea read_boundary(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kBundle, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "boundary.json: " + std::string(e.what()));
  }
  auto is_point = [](const json& p) {
    return p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number();
  };
  if (!doc.is_array() || doc.empty()) {
    throw Error(ErrorKind::kSchema, "boundary.json: expected an array of [x, y] pairs");
  }
  if (!is_point(doc[0])) {
    if (doc.size() != 1) {
      throw Error(ErrorKind::kSchema, "boundary.json: only a single ring is supported");
    }
    doc = json(doc[0]);
  }
  std::vector<Point2> ring;
  for (const json& p : doc) {
    if (!is_point(p)) throw Error(ErrorKind::kSchema, "boundary.json: malformed vertex");
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return StudyArea(std::move(ring));
}

}  // namespace

Dataset load_dataset(const fs::path& bundle) {
  if (!fs::is_directory(bundle)) {
    throw Error(ErrorKind::kBundle, "bundle directory not found: " + bundle.string());
  }
  for (const char* required : {"segments.csv", "static_features.csv", "observations.csv"}) {
    if (!fs::exists(bundle / required)) {
      throw Error(ErrorKind::kBundle, "bundle is missing " + std::string(required));
    }
  }
  Dataset ds;
  ds.name = bundle.filename().string();
  if (ds.name.empty()) ds.name = bundle.parent_path().filename().string();
  ds.segments = read_segments(bundle / "segments.csv");
  ds.graph = build_segment_graph(ds.segments);

  const csv::Table statics = csv::read(bundle / "static_features.csv");
  if (statics.header.empty() || statics.header[0] != "segment_id") {
    throw Error(ErrorKind::kSchema, "static_features.csv: first column must be segment_id");
  }
  std::optional<csv::Table> temporal;
  if (fs::exists(bundle / "temporal_features.csv")) {
    temporal = csv::read(bundle / "temporal_features.csv");
    if (temporal->header.empty() || temporal->header[0] != "date") {
      throw Error(ErrorKind::kSchema, "temporal_features.csv: first column must be date");
    }
  }
  std::optional<csv::Table> spatiotemporal;
  if (fs::exists(bundle / "spatiotemporal_features.csv")) {
    spatiotemporal = csv::read(bundle / "spatiotemporal_features.csv");
    if (spatiotemporal->header.size() < 2 || spatiotemporal->header[0] != "segment_id" ||
        spatiotemporal->header[1] != "date") {
      throw Error(ErrorKind::kSchema,
                  "spatiotemporal_features.csv: first columns must be segment_id,date");
    }
  }

  if (fs::exists(bundle / "schema.json")) {
    std::ifstream in(bundle / "schema.json");
    try {
      ds.schema = FeatureSchema::from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, "schema.json: " + std::string(e.what()));
    }
  } else {
    std::vector<ColumnSpec> specs;
    infer_columns(statics, 1, Variability::kStatic, specs);
    if (temporal) infer_columns(*temporal, 1, Variability::kTemporal, specs);
    if (spatiotemporal) infer_columns(*spatiotemporal, 2, Variability::kSpatiotemporal, specs);
    ds.schema = FeatureSchema(std::move(specs));
  }
  check_columns(statics, 1, ds.schema, Variability::kStatic);
  if (temporal) check_columns(*temporal, 1, ds.schema, Variability::kTemporal);
  if (spatiotemporal) check_columns(*spatiotemporal, 2, ds.schema, Variability::kSpatiotemporal);

  // Static rows, aligned with segments.
  ds.static_features.columns = feature_columns(statics, 1);
  ds.static_features.rows.assign(
      ds.segments.size(),
      std::vector<FeatureValue>(ds.static_features.columns.size(), std::monostate{}));
  std::vector<bool> seen(ds.segments.size(), false);
  for (std::size_t r = 0; r < statics.rows.size(); ++r) {
    const SegmentId id = parse_id(statics, r, 0);
    if (!ds.graph.contains(id)) {
      throw Error(ErrorKind::kIntegrity,
                  where(statics, r) + ": unknown segment " + std::to_string(id));
    }
    const auto i = static_cast<std::size_t>(ds.graph.index_of(id));
    if (seen[i]) {
      throw Error(ErrorKind::kIntegrity,
                  where(statics, r) + ": duplicate segment " + std::to_string(id));
    }
    seen[i] = true;
    ds.static_features.rows[i] = parse_feature_row(statics, r, 1, ds.schema);
  }

  // Observations.
  const csv::Table obs = csv::read(bundle / "observations.csv");
  const std::size_t o_seg = obs.require("segment_id");
  const std::size_t o_date = obs.require("date");
  const std::size_t o_count = obs.require("count");
  const auto o_hour = obs.column("hour");
  ds.observations.reserve(obs.rows.size());
  for (std::size_t r = 0; r < obs.rows.size(); ++r) {
    Observation o;
    o.segment = parse_id(obs, r, o_seg);
    if (!ds.graph.contains(o.segment)) {
      throw Error(ErrorKind::kIntegrity,
                  where(obs, r) + ": unknown segment " + std::to_string(o.segment));
    }
    o.date = parse_row_date(obs, r, o_date);
    if (o_hour && !obs.rows[r][*o_hour].empty()) {
      auto h = csv::to_int(obs.rows[r][*o_hour]);
      if (!h || *h < 0 || *h > 23) {
        throw Error(ErrorKind::kParse, where(obs, r) + ": invalid hour '" +
                                           obs.rows[r][*o_hour] + "'");
      }
      o.hour = static_cast<int>(*h);
    }
    const std::string& cell = obs.rows[r][o_count];
    auto count = csv::to_int(cell);
    if (!count) {
      auto real = csv::to_double(cell);
      if (real && std::floor(*real) == *real && std::abs(*real) < 9.0e15) {
        count = static_cast<std::int64_t>(*real);
      }
    }
    if (!count || *count < 0) {
      throw Error(ErrorKind::kParse, where(obs, r) + ": count must be a non-negative integer, "
                                                     "found '" + cell + "'");
    }
    o.count = *count;
    ds.observations.push_back(o);
  }
  if (!ds.observations.empty()) {
    const bool first_hourly = ds.observations.front().hour >= 0;
    for (std::size_t r = 0; r < ds.observations.size(); ++r) {
      if ((ds.observations[r].hour >= 0) != first_hourly) {
        throw Error(ErrorKind::kSchema,
                    where(obs, r) + ": mixed daily and hourly observations");
      }
    }
  }

  // Calendar and temporal rows.
  if (temporal) {
    std::vector<std::pair<Date, std::size_t>> dated;
    for (std::size_t r = 0; r < temporal->rows.size(); ++r) {
      dated.emplace_back(parse_row_date(*temporal, r, 0), r);
    }
    std::sort(dated.begin(), dated.end());
    std::vector<Date> dates;
    for (std::size_t k = 0; k < dated.size(); ++k) {
      if (k > 0 && dated[k].first == dated[k - 1].first) {
        throw Error(ErrorKind::kIntegrity, where(*temporal, dated[k].second) +
                                               ": duplicate date " +
                                               format_date(dated[k].first));
      }
      dates.push_back(dated[k].first);
    }
    ds.calendar = Calendar(std::move(dates));
    ds.temporal_features.columns = feature_columns(*temporal, 1);
    for (const auto& [date, r] : dated) {
      ds.temporal_features.rows.push_back(parse_feature_row(*temporal, r, 1, ds.schema));
    }
    for (std::size_t r = 0; r < ds.observations.size(); ++r) {
      if (!ds.calendar.contains(ds.observations[r].date)) {
        throw Error(ErrorKind::kIntegrity,
                    where(obs, r) + ": date " + format_date(ds.observations[r].date) +
                        " is not in temporal_features.csv");
      }
    }
  } else {
    std::vector<Date> dates;
    dates.reserve(ds.observations.size());
    for (const Observation& o : ds.observations) dates.push_back(o.date);
    ds.calendar = Calendar(std::move(dates));
  }

  if (spatiotemporal) {
    ds.spatiotemporal_features.columns = feature_columns(*spatiotemporal, 2);
    std::vector<std::tuple<SegmentId, Date, std::size_t>> keyed;
    for (std::size_t r = 0; r < spatiotemporal->rows.size(); ++r) {
      const SegmentId id = parse_id(*spatiotemporal, r, 0);
      if (!ds.graph.contains(id)) {
        throw Error(ErrorKind::kIntegrity,
                    where(*spatiotemporal, r) + ": unknown segment " + std::to_string(id));
      }
      keyed.emplace_back(id, parse_row_date(*spatiotemporal, r, 1), r);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < keyed.size(); ++k) {
      const auto& [id, date, r] = keyed[k];
      if (k > 0 && std::get<0>(keyed[k - 1]) == id && std::get<1>(keyed[k - 1]) == date) {
        throw Error(ErrorKind::kIntegrity, where(*spatiotemporal, r) + ": duplicate record");
      }
      ds.spatiotemporal_keys.emplace_back(id, date);
      ds.spatiotemporal_features.rows.push_back(
          parse_feature_row(*spatiotemporal, r, 2, ds.schema));
    }
  }

  ds.reindex();
  for (std::size_t r = 1; r < ds.observations.size(); ++r) {
    const Observation& a = ds.observations[r - 1];
    const Observation& b = ds.observations[r];
    if (a.segment == b.segment && a.date == b.date && a.hour == b.hour) {
      throw Error(ErrorKind::kIntegrity, "observations.csv: duplicate observation for segment " +
                                             std::to_string(a.segment) + " on " +
                                             format_date(a.date));
    }
  }

  if (fs::exists(bundle / "boundary.json")) {
    ds.study_area = read_boundary(bundle / "boundary.json");
  } else {
    std::vector<Point2> mids;
    for (const Segment& s : ds.segments) mids.push_back(s.midpoint);
    ds.study_area = StudyArea::bounding_box_of(mids);
    ds.boundary_inferred = true;
  }
  for (const Segment& s : ds.segments) {
    if (!ds.study_area->contains(s.midpoint)) {
      throw Error(ErrorKind::kIntegrity, "segment " + std::to_string(s.id) +
                                             " midpoint lies outside the study area");
    }
  }

  if (fs::exists(bundle / "existing_sensors.csv")) {
    const csv::Table t = csv::read(bundle / "existing_sensors.csv");
    const std::size_t c = t.require("segment_id");
    std::set<SegmentId> seen_ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const SegmentId id = parse_id(t, r, c);
      if (!ds.graph.contains(id)) {
        throw Error(ErrorKind::kIntegrity, where(t, r) + ": unknown segment " + std::to_string(id));
      }
      if (seen_ids.insert(id).second) ds.existing_sensors.push_back(id);
    }
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Saving

namespace {

std::string cell_text(const FeatureValue& v) {
  if (const double* d = std::get_if<double>(&v)) return format_double(*d);
  if (const std::string* s = std::get_if<std::string>(&v)) return *s;
  return {};
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kBundle, "cannot write " + path.string());
  return out;
}

}  // namespace

void save_dataset(const Dataset& ds, const fs::path& bundle) {
  fs::create_directories(bundle);
  {
    const bool coords = std::any_of(ds.segments.begin(), ds.segments.end(), [](const Segment& s) {
      return s.endpoint_a_xy.has_value() || s.endpoint_b_xy.has_value();
    });
    auto out = open_out(bundle / "segments.csv");
    std::vector<std::string> header = {"segment_id", "midpoint_x", "midpoint_y", "endpoint_a",
                                       "endpoint_b"};
    if (coords) {
      header.insert(header.end(),
                    {"endpoint_a_x", "endpoint_a_y", "endpoint_b_x", "endpoint_b_y"});
    }
    header.push_back("length");
    csv::write_row(out, header);
    for (const Segment& s : ds.segments) {
      std::vector<std::string> row = {
          std::to_string(s.id), format_double(s.midpoint.x), format_double(s.midpoint.y),
          s.endpoint_a ? std::to_string(*s.endpoint_a) : "",
          s.endpoint_b ? std::to_string(*s.endpoint_b) : ""};
      if (coords) {
        for (const auto& p : {s.endpoint_a_xy, s.endpoint_b_xy}) {
          row.push_back(p ? format_double(p->x) : "");
          row.push_back(p ? format_double(p->y) : "");
        }
      }
      row.push_back(format_double(s.length));
      csv::write_row(out, row);
    }
  }
  {
    auto out = open_out(bundle / "schema.json");
    out << ds.schema.to_json().dump(2) << '\n';
  }
  {
    auto out = open_out(bundle / "static_features.csv");
    std::vector<std::string> header = {"segment_id"};
    header.insert(header.end(), ds.static_features.columns.begin(),
                  ds.static_features.columns.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < ds.segments.size(); ++i) {
      std::vector<std::string> row = {std::to_string(ds.segments[i].id)};
      if (i < ds.static_features.rows.size()) {
        for (const FeatureValue& v : ds.static_features.rows[i]) row.push_back(cell_text(v));
      } else {
        row.resize(header.size());
      }
      csv::write_row(out, row);
    }
  }
  if (!ds.temporal_features.rows.empty()) {
    auto out = open_out(bundle / "temporal_features.csv");
    std::vector<std::string> header = {"date"};
    header.insert(header.end(), ds.temporal_features.columns.begin(),
                  ds.temporal_features.columns.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < ds.temporal_features.rows.size(); ++i) {
      std::vector<std::string> row = {format_date(ds.calendar.dates()[i])};
      for (const FeatureValue& v : ds.temporal_features.rows[i]) row.push_back(cell_text(v));
      csv::write_row(out, row);
    }
  }
  if (!ds.spatiotemporal_features.rows.empty()) {
    auto out = open_out(bundle / "spatiotemporal_features.csv");
    std::vector<std::string> header = {"segment_id", "date"};
    header.insert(header.end(), ds.spatiotemporal_features.columns.begin(),
                  ds.spatiotemporal_features.columns.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < ds.spatiotemporal_features.rows.size(); ++i) {
      std::vector<std::string> row = {std::to_string(ds.spatiotemporal_keys[i].first),
                                      format_date(ds.spatiotemporal_keys[i].second)};
      for (const FeatureValue& v : ds.spatiotemporal_features.rows[i]) {
        row.push_back(cell_text(v));
      }
      csv::write_row(out, row);
    }
  }
  {
    const bool hourly = ds.hourly();
    auto out = open_out(bundle / "observations.csv");
    std::ostringstream buf;
    buf << (hourly ? "segment_id,date,hour,count\n" : "segment_id,date,count\n");
    for (const Observation& o : ds.observations) {
      buf << o.segment << ',' << format_date(o.date) << ',';
      if (hourly) buf << o.hour << ',';
      buf << o.count << '\n';
    }
    out << buf.str();
  }
  if (ds.study_area && !ds.boundary_inferred) {
    json ring = json::array();
    for (const Point2& p : ds.study_area->ring()) ring.push_back({p.x, p.y});
    auto out = open_out(bundle / "boundary.json");
    out << json::array({ring}).dump() << '\n';
  }
  const fs::path existing = bundle / "existing_sensors.csv";
  if (!ds.existing_sensors.empty()) {
    auto out = open_out(existing);
    out << "segment_id\n";
    for (SegmentId id : ds.existing_sensors) out << id << '\n';
  } else if (fs::exists(existing)) {
    fs::remove(existing);
  }
}

// ---------------------------------------------------------------------------
// Outliers

json OutlierReport::to_json() const {
  json removed_rows = json::array();
  for (const Observation& o : removed) {
    json row = {{"segment_id", o.segment}, {"date", format_date(o.date)}, {"count", o.count}};
    if (o.hour >= 0) row["hour"] = o.hour;
    removed_rows.push_back(std::move(row));
  }
  return {{"k_sigma", k_sigma},
          {"total", total},
          {"removed_count", removed.size()},
          {"removal_fraction", removal_fraction},
          {"removed", std::move(removed_rows)}};
}

std::pair<Dataset, OutlierReport> filter_outliers(const Dataset& dataset, double k_sigma) {
  if (!(k_sigma > 0.0)) {
    throw Error(ErrorKind::kParameter, "k_sigma must be positive");
  }
  OutlierReport report;
  report.k_sigma = k_sigma;
  report.total = dataset.observations.size();
  Dataset out = dataset;
  out.observations.clear();
  out.observations.reserve(dataset.observations.size());
  for (const Segment& s : dataset.segments) {
    const auto obs = dataset.observations_of(s.id);
    const std::size_t n = obs.size();
    if (n < 2) {
      out.observations.insert(out.observations.end(), obs.begin(), obs.end());
      continue;
    }
    double mean = 0.0;
    for (const Observation& o : obs) mean += static_cast<double>(o.count);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const Observation& o : obs) {
      const double d = static_cast<double>(o.count) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (const Observation& o : obs) {
      if (sd > 0.0 && std::abs(static_cast<double>(o.count) - mean) > k_sigma * sd) {
        report.removed.push_back(o);
      } else {
        out.observations.push_back(o);
      }
    }
  }
  report.removal_fraction =
      report.total == 0 ? 0.0
                        : static_cast<double>(report.removed.size()) /
                              static_cast<double>(report.total);
  out.reindex();
  return {std::move(out), std::move(report)};
}

// ---------------------------------------------------------------------------
// Splits

json SplitAssignment::to_json() const {
  return {{"seed", seed},
          {"fractions", {{"train", fractions.train}, {"val", fractions.val},
                         {"test", fractions.test}}},
          {"train", train},
          {"val", val},
          {"test", test}};
}

SplitAssignment split_segments(std::span<const SegmentId> ids, SplitFractions fractions,
                               std::uint64_t seed, std::span<const SegmentId> pinned_train) {
  if (!(fractions.train > 0.0 && fractions.val > 0.0 && fractions.test > 0.0) ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw Error(ErrorKind::kParameter, "split fractions must be positive and sum to 1");
  }
  std::vector<SegmentId> all(ids.begin(), ids.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw Error(ErrorKind::kSplit, "duplicate segment ids in split input");
  }
  const std::size_t n = all.size();
  if (n < 3) {
    throw Error(ErrorKind::kSplit, "need at least 3 segments to split, found " +
                                       std::to_string(n));
  }
  auto block = [n](double f) {
    const auto k = static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
    return std::max<std::size_t>(1, k);
  };
  const std::size_t n_val = block(fractions.val);
  const std::size_t n_test = block(fractions.test);

  std::set<SegmentId> pinned(pinned_train.begin(), pinned_train.end());
  std::vector<SegmentId> pool;
  for (SegmentId id : all) {
    if (!pinned.count(id)) pool.push_back(id);
  }
  if (pool.size() + pinned.size() != n) {
    throw Error(ErrorKind::kSplit, "pinned training segment is not in the segment set");
  }
  if (pool.size() < n_val + n_test) {
    throw Error(ErrorKind::kSplit, "too many pinned training segments for the split sizes");
  }
  Rng rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);

  SplitAssignment split;
  split.fractions = fractions;
  split.seed = seed;
  split.val.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_val),
                    pool.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  split.train.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), pool.end());
  split.train.insert(split.train.end(), pinned.begin(), pinned.end());
  for (auto* v : {&split.train, &split.val, &split.test}) std::sort(v->begin(), v->end());
  return split;
}

SplitAssignment split_segments(const Dataset& dataset, SplitFractions fractions,
                               std::uint64_t seed, bool pin_existing) {
  const auto ids = dataset.segment_ids();
  std::span<const SegmentId> pinned;
  if (pin_existing) pinned = dataset.existing_sensors;
  return split_segments(ids, fractions, seed, pinned);
}

// ---------------------------------------------------------------------------
// Synthetic city

json SyntheticCityConfig::to_json() const {
  return {{"width", width},         {"height", height},   {"n_days", n_days},
          {"noise_scale", noise_scale}, {"seed", seed},   {"spacing", spacing},
          {"hotspots", hotspots},   {"start_date", start_date}};
}

SyntheticCityConfig SyntheticCityConfig::from_json(const json& doc) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::kConfiguration, "synthetic city config must be an object");
  }
  SyntheticCityConfig c;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "width") c.width = value.get<int>();
      else if (key == "height") c.height = value.get<int>();
      else if (key == "n_days") c.n_days = value.get<int>();
      else if (key == "noise_scale") c.noise_scale = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "spacing") c.spacing = value.get<double>();
      else if (key == "hotspots") c.hotspots = value.get<int>();
      else if (key == "start_date") c.start_date = value.get<std::string>();
      else throw Error(ErrorKind::kConfiguration, "unknown synthetic city field '" + key + "'");
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfiguration,
                  "synthetic city field '" + key + "': " + std::string(e.what()));
    }
  }
  return c;
}

namespace {

// Local clustering coefficient per node.
std::vector<double> clustering(const SegmentGraph& g) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto nb = g.neighbors(static_cast<int>(v));
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const auto na = g.neighbors(nb[a]);
      for (std::size_t b = a + 1; b < k; ++b) {
        if (std::binary_search(na.begin(), na.end(), nb[b])) ++links;
      }
    }
    out[v] = 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return out;
}

}  // namespace

std::pair<Dataset, SyntheticTruth> generate_synthetic_city(const SyntheticCityConfig& c) {
  if (c.width < 2 || c.height < 2) {
    throw Error(ErrorKind::kParameter, "synthetic city needs width, height >= 2");
  }
  if (c.n_days < 7) throw Error(ErrorKind::kParameter, "synthetic city needs n_days >= 7");
  if (!(c.noise_scale >= 0.0) || !(c.spacing > 0.0) || c.hotspots < 0) {
    throw Error(ErrorKind::kParameter, "invalid synthetic city parameters");
  }
  const Date start = parse_date(c.start_date);
  const int w = c.width;
  const int h = c.height;
  const double s = c.spacing;
  const double extent_x = (w - 1) * s;
  const double extent_y = (h - 1) * s;

  Dataset ds;
  ds.name = "synthetic";
  SyntheticTruth truth;
  truth.intercept = 2.5;

  Rng hot_rng(derive_seed(c.seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extent = std::max(extent_x, extent_y);
  for (int b = 0; b < c.hotspots; ++b) {
    Hotspot hs;
    hs.center = {unit(hot_rng) * extent_x, unit(hot_rng) * extent_y};
    hs.amplitude = 0.8 + 0.8 * unit(hot_rng);
    hs.sigma = (0.08 + 0.12 * unit(hot_rng)) * extent;
    truth.hotspots.push_back(hs);
  }
  auto field = [&](Point2 p) {
    double f = 0.0;
    for (const Hotspot& hs : truth.hotspots) {
      f += hs.amplitude * std::exp(-squared_distance(p, hs.center) / (2.0 * hs.sigma * hs.sigma));
    }
    return f;
  };

  // Horizontal edges row by row, then vertical edges column by column.
  enum class Line { kPrimary, kSecondary, kResidential };
  struct Raw {
    Segment seg;
    Line line;
  };
  std::vector<Raw> raw;
  auto node = [w](int i, int j) { return static_cast<std::int64_t>(j) * w + i; };
  // Each grid line carries one street class for its whole length.
  Rng line_rng(derive_seed(c.seed, 4));
  auto draw_lines = [&](int count) {
    std::vector<Line> lines(count);
    for (Line& line : lines) {
      const double u = unit(line_rng);
      line = u < 0.2 ? Line::kPrimary : (u < 0.4 ? Line::kSecondary : Line::kResidential);
    }
    return lines;
  };
  const std::vector<Line> rows = draw_lines(h);
  const std::vector<Line> cols = draw_lines(w);
  SegmentId next_id = 1;
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i + 1 < w; ++i) {
      Segment seg;
      seg.id = next_id++;
      seg.midpoint = {(i + 0.5) * s, j * s};
      seg.endpoint_a = node(i, j);
      seg.endpoint_b = node(i + 1, j);
      seg.length = s;
      raw.push_back({seg, rows[j]});
    }
  }
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j + 1 < h; ++j) {
      Segment seg;
      seg.id = next_id++;
      seg.midpoint = {i * s, (j + 0.5) * s};
      seg.endpoint_a = node(i, j);
      seg.endpoint_b = node(i, j + 1);
      seg.length = s;
      raw.push_back({seg, cols[i]});
    }
  }
  for (const Raw& r : raw) ds.segments.push_back(r.seg);
  ds.graph = build_segment_graph(ds.segments);
  const std::size_t n = ds.segments.size();

  const auto betweenness = centrality_scores(ds.graph, CentralityKind::kBetweenness);
  const auto closeness = centrality_scores(ds.graph, CentralityKind::kCloseness);
  const auto clust = clustering(ds.graph);

  std::vector<ColumnSpec> specs = {
      {"lanes", ColumnKind::kNumeric, Variability::kStatic},
      {"street_type", ColumnKind::kCategorical, Variability::kStatic},
      {"surface", ColumnKind::kCategorical, Variability::kStatic},
      {"max_speed", ColumnKind::kNumeric, Variability::kStatic},
      {"coord_x", ColumnKind::kNumeric, Variability::kStatic},
      {"coord_y", ColumnKind::kNumeric, Variability::kStatic},
      {"poi_shops", ColumnKind::kNumeric, Variability::kStatic},
      {"degree", ColumnKind::kNumeric, Variability::kStatic},
      {"betweenness", ColumnKind::kNumeric, Variability::kStatic},
      {"closeness", ColumnKind::kNumeric, Variability::kStatic},
      {"clustering", ColumnKind::kNumeric, Variability::kStatic},
      {"weekday", ColumnKind::kCategorical, Variability::kTemporal},
      {"temperature", ColumnKind::kNumeric, Variability::kTemporal},
  };
  for (const ColumnSpec& spec : specs) {
    auto& table = spec.variability == Variability::kStatic ? ds.static_features
                                                           : ds.temporal_features;
    table.columns.push_back(spec.name);
  }
  ds.schema = FeatureSchema(std::move(specs));

  // Static attributes and the location part of the log-mean.
  Rng attr_rng(derive_seed(c.seed, 1));
  std::vector<double> location_effect(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Segment& seg = ds.segments[k];
    Line line = raw[k].line;
    std::string type;
    double lanes = 1.0;
    double speed = 30.0;
    double type_effect = 0.0;
    const bool living = line == Line::kResidential && unit(attr_rng) < 0.08;
    switch (line) {
      case Line::kPrimary:
        type = "primary";
        lanes = unit(attr_rng) < 0.5 ? 2.0 : 3.0;
        speed = 50.0;
        type_effect = 0.8;
        break;
      case Line::kSecondary:
        type = "secondary";
        lanes = 2.0;
        speed = 50.0;
        type_effect = 0.4;
        break;
      case Line::kResidential:
        type = living ? "living_street" : "residential";
        lanes = 1.0;
        speed = living ? 10.0 : 30.0;
        type_effect = living ? -0.5 : 0.0;
        break;
    }
    const double u = unit(attr_rng);
    std::string surface = u < 0.80 ? "asphalt" : (u < 0.95 ? "cobblestone" : "gravel");
    const double surface_effect = surface == "asphalt" ? 0.0 : (surface == "cobblestone" ? -0.3 : -0.5);
    const double f = field(seg.midpoint);
    std::poisson_distribution<int> shops(1.0 + 6.0 * f);
    const double poi = static_cast<double>(shops(attr_rng));
    const auto gi = static_cast<std::size_t>(ds.graph.index_of(seg.id));
    ds.static_features.rows.push_back({lanes, type, surface, speed, seg.midpoint.x,
                                       seg.midpoint.y, poi,
                                       static_cast<double>(ds.graph.neighbors(static_cast<int>(gi)).size()),
                                       betweenness.values[gi], closeness.values[gi], clust[gi]});
    location_effect[k] =
        truth.intercept + 1.2 * f + type_effect + 0.1 * (lanes - 1.0) + surface_effect;
  }

  // Calendar and temporal attributes.
  Rng temp_rng(derive_seed(c.seed, 2));
  std::normal_distribution<double> temp_noise(0.0, 2.0);
  std::vector<Date> dates;
  std::vector<double> day_effect;
  constexpr std::array<double, 7> kWeekdayEffect = {0.0, 0.0, 0.0, 0.0, 0.0, -0.15, -0.35};
  for (int d = 0; d < c.n_days; ++d) {
    const Date date = add_days(start, d);
    dates.push_back(date);
    const Date jan1{date.year(), std::chrono::January, std::chrono::day{1}};
    const int doy = days_between(jan1, date);
    const double temperature =
        10.0 - 10.0 * std::cos(2.0 * std::numbers::pi * (doy - 15) / 365.25) + temp_noise(temp_rng);
    const Weekday wd = weekday_of(date);
    ds.temporal_features.rows.push_back(
        {std::string(to_string(wd)), std::round(temperature * 10.0) / 10.0});
    day_effect.push_back(kWeekdayEffect[static_cast<int>(wd)] + 0.03 * (temperature - 10.0));
  }
  ds.calendar = Calendar(dates);

  // Counts.
  Rng noise_rng(derive_seed(c.seed, 3));
  std::normal_distribution<double> eps(0.0, 1.0);
  const double sigma = c.noise_scale;
  truth.log_mean = Matrix(n, static_cast<std::size_t>(c.n_days));
  truth.expected = Matrix(n, static_cast<std::size_t>(c.n_days));
  ds.observations.reserve(n * static_cast<std::size_t>(c.n_days));
  for (std::size_t k = 0; k < n; ++k) {
    for (int d = 0; d < c.n_days; ++d) {
      const double lm = location_effect[k] + day_effect[static_cast<std::size_t>(d)];
      const double mu = std::exp(lm);
      truth.log_mean(k, static_cast<std::size_t>(d)) = lm;
      truth.expected(k, static_cast<std::size_t>(d)) = std::round(mu);
      double value = mu;
      if (sigma > 0.0) value = mu * std::exp(sigma * eps(noise_rng) - 0.5 * sigma * sigma);
      ds.observations.push_back(
          {ds.segments[k].id, dates[static_cast<std::size_t>(d)], -1,
           static_cast<std::int64_t>(std::llround(value))});
    }
  }
  ds.study_area = StudyArea({{0.0, 0.0}, {extent_x, 0.0}, {extent_x, extent_y}, {0.0, extent_y}});
  ds.reindex();
  return {std::move(ds), std::move(truth)};
}

}  // namespace sensorplace
