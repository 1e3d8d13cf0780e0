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

// Feature preprocessing (standardization, one-hot encoding, subset
// selection) and the feature-space placement objectives.

#ifndef SENSORPLACE_FEATURE_SPACE_H_
#define SENSORPLACE_FEATURE_SPACE_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sensorplace/common.h"

namespace sensorplace {

enum class ColumnKind { kNumeric, kCategorical };
enum class Variability { kStatic, kTemporal, kSpatiotemporal };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Variability variability);
ColumnKind parse_column_kind(std::string_view text);
Variability parse_variability(std::string_view text);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  Variability variability = Variability::kStatic;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws kSchema on duplicate names.
  explicit FeatureSchema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  const ColumnSpec* find(std::string_view name) const;
  std::vector<std::string> names(Variability variability) const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& doc);

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<ColumnSpec> columns_;
};

// A raw cell: missing, numeric, or categorical level.
using FeatureValue = std::variant<std::monostate, double, std::string>;

struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<std::vector<FeatureValue>> rows;

  // Index of `name` in `columns`, or nullopt.
  std::optional<std::size_t> column_index(std::string_view name) const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

// Fitted encoding of one source column.
struct ColumnEncoding {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  double mean = 0.0;
  double stddev = 0.0;              // sample (n-1); 0 for constant columns
  std::vector<std::string> levels;  // sorted, categorical only
  std::size_t offset = 0;           // first encoded dimension

  std::size_t width() const {
    return kind == ColumnKind::kNumeric ? 1 : levels.size();
  }
};

class EncodingMap {
 public:
  EncodingMap() = default;
  explicit EncodingMap(std::vector<ColumnEncoding> columns);

  const std::vector<ColumnEncoding>& columns() const { return columns_; }
  std::size_t width() const { return width_; }
  std::vector<std::string> encoded_names() const;

  // Encodes `row`, whose cells follow `table_columns`. `lookup` maps each
  // encoding column to its position in the row (see bind()).
  void encode(std::span<const FeatureValue> row,
              std::span<const std::size_t> lookup, std::span<double> out) const;
  // Positions of every encoded column in `table_columns`; throws kSchema if a
  // column is missing.
  std::vector<std::size_t> bind(std::span<const std::string> table_columns) const;

 private:
  std::vector<ColumnEncoding> columns_;
  std::size_t width_ = 0;
};

// Fits standardization statistics and level dictionaries for `columns` (all
// schema columns present in `rows` when empty) from the given rows.
EncodingMap fit_preprocessor(const FeatureTable& rows,
                             const FeatureSchema& schema,
                             std::span<const std::string> columns = {});

// Numeric: (x - mean)/std, 0 when std == 0 or the cell is missing.
// Categorical: one indicator per fitted level; unseen or missing levels
// encode as an all-zero block.
Matrix transform(const FeatureTable& rows, const EncodingMap& encoding);

enum class FeatureSubset {
  kAllStatic,
  kInfrastructureSelected,
  kConnectivity,
  kInfrastructureFull,
  kPointsOfInterest,
  kCustom,
};

struct FeatureSubsetSpec {
  FeatureSubset name = FeatureSubset::kAllStatic;
  std::vector<std::string> custom_columns;

  std::string label() const;
  static FeatureSubsetSpec parse(std::string_view text);

  friend bool operator==(const FeatureSubsetSpec&,
                         const FeatureSubsetSpec&) = default;
};

// Static columns selected by `spec`. Presets:
//   infrastructure_selected  lanes, street_type, surface, max_speed
//   connectivity             betweenness, degree, closeness, clustering
//   points_of_interest       static columns prefixed "poi_"
//   infrastructure_full      the infrastructure_selected columns plus static
//                            columns prefixed "infra_" or "poi_"
// Throws kSchema when a required column is missing or the result is empty.
std::vector<std::string> resolve_feature_subset(const FeatureSubsetSpec& spec,
                                                const FeatureSchema& schema);

enum class FeatureObjective { kDiversity, kRedundancy, kCoverage };

std::string_view to_string(FeatureObjective objective);

// Objective over the rows of `vectors`:
//   diversity   mean pairwise Euclidean distance
//   redundancy  mean pairwise cosine similarity
//   coverage    mean over dimensions of the population variance
double score_feature_objective(const Matrix& vectors,
                               FeatureObjective objective);

double cosine_similarity(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace sensorplace

#endif  // SENSORPLACE_FEATURE_SPACE_H_
