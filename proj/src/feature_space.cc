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

#include "sensorplace/feature_space.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace sensorplace {

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

std::string_view to_string(Variability variability) {
  switch (variability) {
    case Variability::kStatic: return "static";
    case Variability::kTemporal: return "temporal";
    case Variability::kSpatiotemporal: return "spatiotemporal";
  }
  return "static";
}

ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric") return ColumnKind::kNumeric;
  if (text == "categorical") return ColumnKind::kCategorical;
  throw Error(ErrorKind::kSchema, "unknown column kind '" + std::string(text) + "'");
}

Variability parse_variability(std::string_view text) {
  if (text == "static") return Variability::kStatic;
  if (text == "temporal") return Variability::kTemporal;
  if (text == "spatiotemporal") return Variability::kSpatiotemporal;
  throw Error(ErrorKind::kSchema, "unknown variability '" + std::string(text) + "'");
}

FeatureSchema::FeatureSchema(std::vector<ColumnSpec> columns)
    : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c.name).second) {
      throw Error(ErrorKind::kSchema, "duplicate feature column '" + c.name + "'");
    }
  }
}

const ColumnSpec* FeatureSchema::find(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> FeatureSchema::names(Variability variability) const {
  std::vector<std::string> out;
  for (const auto& c : columns_) {
    if (c.variability == variability) out.push_back(c.name);
  }
  return out;
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"name", c.name},
                    {"kind", to_string(c.kind)},
                    {"variability", to_string(c.variability)}});
  }
  return {{"columns", cols}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_array()) {
    throw Error(ErrorKind::kSchema, "schema document needs a 'columns' array");
  }
  std::vector<ColumnSpec> cols;
  for (const auto& c : doc["columns"]) {
    if (!c.contains("name") || !c.contains("kind") || !c.contains("variability")) {
      throw Error(ErrorKind::kSchema,
                  "schema column needs name, kind and variability");
    }
    cols.push_back({c["name"].get<std::string>(),
                    parse_column_kind(c["kind"].get<std::string>()),
                    parse_variability(c["variability"].get<std::string>())});
  }
  return FeatureSchema(std::move(cols));
}

std::optional<std::size_t> FeatureTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

EncodingMap::EncodingMap(std::vector<ColumnEncoding> columns)
    : columns_(std::move(columns)) {
  std::size_t offset = 0;
  for (auto& c : columns_) {
    c.offset = offset;
    offset += c.width();
  }
  width_ = offset;
}

std::vector<std::string> EncodingMap::encoded_names() const {
  std::vector<std::string> out;
  out.reserve(width_);
  for (const auto& c : columns_) {
    if (c.kind == ColumnKind::kNumeric) {
      out.push_back(c.name);
    } else {
      for (const auto& level : c.levels) out.push_back(c.name + "=" + level);
    }
  }
  return out;
}

std::vector<std::size_t> EncodingMap::bind(
    std::span<const std::string> table_columns) const {
  std::vector<std::size_t> lookup;
  lookup.reserve(columns_.size());
  for (const auto& c : columns_) {
    auto it = std::find(table_columns.begin(), table_columns.end(), c.name);
    if (it == table_columns.end()) {
      throw Error(ErrorKind::kSchema, "missing feature column '" + c.name + "'");
    }
    lookup.push_back(static_cast<std::size_t>(it - table_columns.begin()));
  }
  return lookup;
}

namespace {

std::string level_text(const FeatureValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  return {};
}

}  // namespace

void EncodingMap::encode(std::span<const FeatureValue> row,
                         std::span<const std::size_t> lookup,
                         std::span<double> out) const {
  if (out.size() != width_) {
    throw Error(ErrorKind::kShape, "encoded output has wrong width");
  }
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    const ColumnEncoding& c = columns_[k];
    const FeatureValue& cell = row[lookup[k]];
    if (c.kind == ColumnKind::kNumeric) {
      const auto* d = std::get_if<double>(&cell);
      out[c.offset] = (d == nullptr || c.stddev == 0.0 || !std::isfinite(*d))
                          ? 0.0
                          : (*d - c.mean) / c.stddev;
    } else {
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(c.offset),
                  c.levels.size(), 0.0);
      if (std::holds_alternative<std::monostate>(cell)) continue;
      const std::string text = level_text(cell);
      auto it = std::lower_bound(c.levels.begin(), c.levels.end(), text);
      if (it != c.levels.end() && *it == text) {
        out[c.offset + static_cast<std::size_t>(it - c.levels.begin())] = 1.0;
      }
    }
  }
}

EncodingMap fit_preprocessor(const FeatureTable& rows,
                             const FeatureSchema& schema,
                             std::span<const std::string> columns) {
  if (rows.rows.empty()) {
    throw Error(ErrorKind::kFit, "cannot fit a preprocessor on zero rows");
  }
  std::vector<std::string> selected(columns.begin(), columns.end());
  if (selected.empty()) {
    for (const auto& c : schema.columns()) {
      if (rows.column_index(c.name)) selected.push_back(c.name);
    }
  }
  std::vector<ColumnEncoding> encodings;
  for (const auto& name : selected) {
    const ColumnSpec* spec = schema.find(name);
    if (spec == nullptr) {
      throw Error(ErrorKind::kSchema, "column '" + name + "' is not in the schema");
    }
    auto idx = rows.column_index(name);
    if (!idx) throw Error(ErrorKind::kSchema, "missing feature column '" + name + "'");
    ColumnEncoding enc;
    enc.name = name;
    enc.kind = spec->kind;
    if (spec->kind == ColumnKind::kNumeric) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& r : rows.rows) {
        if (const auto* d = std::get_if<double>(&r[*idx])) {
          if (std::isfinite(*d)) {
            sum += *d;
            ++n;
          }
        } else if (std::holds_alternative<std::string>(r[*idx])) {
          throw Error(ErrorKind::kSchema,
                      "non-numeric value in numeric column '" + name + "'");
        }
      }
      enc.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
      double ss = 0.0;
      for (const auto& r : rows.rows) {
        if (const auto* d = std::get_if<double>(&r[*idx]); d && std::isfinite(*d)) {
          ss += (*d - enc.mean) * (*d - enc.mean);
        }
      }
      enc.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    } else {
      std::set<std::string> levels;
      for (const auto& r : rows.rows) {
        if (!std::holds_alternative<std::monostate>(r[*idx])) {
          levels.insert(level_text(r[*idx]));
        }
      }
      enc.levels.assign(levels.begin(), levels.end());
    }
    encodings.push_back(std::move(enc));
  }
  return EncodingMap(std::move(encodings));
}

Matrix transform(const FeatureTable& rows, const EncodingMap& encoding) {
  const auto lookup = encoding.bind(rows.columns);
  Matrix out(rows.rows.size(), encoding.width());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    if (rows.rows[i].size() != rows.columns.size()) {
      throw Error(ErrorKind::kSchema, "row " + std::to_string(i) +
                                          " does not match the table header");
    }
    encoding.encode(rows.rows[i], lookup, out.row(i));
  }
  return out;
}

std::string FeatureSubsetSpec::label() const {
  switch (name) {
    case FeatureSubset::kAllStatic: return "all_static";
    case FeatureSubset::kInfrastructureSelected: return "infrastructure_selected";
    case FeatureSubset::kConnectivity: return "connectivity";
    case FeatureSubset::kInfrastructureFull: return "infrastructure_full";
    case FeatureSubset::kPointsOfInterest: return "points_of_interest";
    case FeatureSubset::kCustom: {
      std::string out = "custom:";
      for (std::size_t i = 0; i < custom_columns.size(); ++i) {
        if (i > 0) out += ",";
        out += custom_columns[i];
      }
      return out;
    }
  }
  return "all_static";
}

FeatureSubsetSpec FeatureSubsetSpec::parse(std::string_view text) {
  FeatureSubsetSpec spec;
  if (text.empty() || text == "all_static") return spec;
  if (text == "infrastructure_selected") {
    spec.name = FeatureSubset::kInfrastructureSelected;
  } else if (text == "connectivity") {
    spec.name = FeatureSubset::kConnectivity;
  } else if (text == "infrastructure_full") {
    spec.name = FeatureSubset::kInfrastructureFull;
  } else if (text == "points_of_interest") {
    spec.name = FeatureSubset::kPointsOfInterest;
  } else if (text.starts_with("custom:")) {
    spec.name = FeatureSubset::kCustom;
    std::string_view rest = text.substr(7);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      if (!item.empty()) spec.custom_columns.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (spec.custom_columns.empty()) {
      throw Error(ErrorKind::kConfiguration, "custom feature subset lists no columns");
    }
  } else {
    throw Error(ErrorKind::kConfiguration,
                "unknown feature subset '" + std::string(text) + "'");
  }
  return spec;
}

std::vector<std::string> resolve_feature_subset(const FeatureSubsetSpec& spec,
                                                const FeatureSchema& schema) {
  const std::vector<std::string> statics = schema.names(Variability::kStatic);
  auto require = [&](const std::vector<std::string>& names) {
    for (const auto& n : names) {
      const ColumnSpec* c = schema.find(n);
      if (c == nullptr || c->variability != Variability::kStatic) {
        throw Error(ErrorKind::kSchema, "feature subset " + spec.label() +
                                            " needs static column '" + n + "'");
      }
    }
    return names;
  };
  auto prefixed = [&](std::initializer_list<std::string_view> prefixes) {
    std::vector<std::string> out;
    for (const auto& n : statics) {
      for (auto p : prefixes) {
        if (n.starts_with(p)) {
          out.push_back(n);
          break;
        }
      }
    }
    return out;
  };
  const std::vector<std::string> infrastructure = {"lanes", "street_type",
                                                   "surface", "max_speed"};
  std::vector<std::string> out;
  switch (spec.name) {
    case FeatureSubset::kAllStatic:
      out = statics;
      break;
    case FeatureSubset::kInfrastructureSelected:
      out = require(infrastructure);
      break;
    case FeatureSubset::kConnectivity:
      out = require({"betweenness", "degree", "closeness", "clustering"});
      break;
    case FeatureSubset::kPointsOfInterest:
      out = prefixed({"poi_"});
      break;
    case FeatureSubset::kInfrastructureFull: {
      out = require(infrastructure);
      for (auto& n : prefixed({"infra_", "poi_"})) out.push_back(n);
      break;
    }
    case FeatureSubset::kCustom:
      out = require(spec.custom_columns);
      break;
  }
  if (out.empty()) {
    throw Error(ErrorKind::kSchema,
                "feature subset " + spec.label() + " selects no static columns");
  }
  return out;
}

std::string_view to_string(FeatureObjective objective) {
  switch (objective) {
    case FeatureObjective::kDiversity: return "diversity";
    case FeatureObjective::kRedundancy: return "redundancy";
    case FeatureObjective::kCoverage: return "coverage";
  }
  return "diversity";
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorKind::kUndefined, "cosine similarity of an all-zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double score_feature_objective(const Matrix& vectors, FeatureObjective objective) {
  const std::size_t k = vectors.rows();
  if (objective == FeatureObjective::kCoverage) {
    if (k < 1) throw Error(ErrorKind::kArity, "coverage needs at least 1 vector");
    const std::size_t d = vectors.cols();
    if (d == 0) return 0.0;
    double total = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      double mean = 0.0;
      for (std::size_t i = 0; i < k; ++i) mean += vectors(i, p);
      mean /= static_cast<double>(k);
      double var = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        var += (vectors(i, p) - mean) * (vectors(i, p) - mean);
      }
      total += var / static_cast<double>(k);
    }
    return total / static_cast<double>(d);
  }
  if (k < 2) {
    throw Error(ErrorKind::kArity,
                std::string(to_string(objective)) + " needs at least 2 vectors");
  }
  double sum = 0.0;
  for (std::size_t v = 0; v < k; ++v) {
    for (std::size_t u = v + 1; u < k; ++u) {
      sum += objective == FeatureObjective::kDiversity
                 ? euclidean_distance(vectors.row(v), vectors.row(u))
                 : cosine_similarity(vectors.row(v), vectors.row(u));
    }
  }
  return 2.0 * sum / (static_cast<double>(k) * static_cast<double>(k - 1));
}

}  // namespace sensorplace
