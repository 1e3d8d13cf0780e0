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

#ifndef SENSORPLACE_COMMON_H_
#define SENSORPLACE_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sensorplace {

using SegmentId = std::int64_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Error categories surfaced to callers. The CLI maps data-side kinds
// (schema, bundle, integrity, parse) to exit code 1 and everything else
// to exit code 2.
enum class ErrorKind {
  kSchema,
  kEmptyGraph,
  kFit,
  kArity,
  kUndefined,
  kParameter,
  kBudget,
  kConfiguration,
  kShape,
  kData,
  kBundle,
  kIntegrity,
  kParse,
  kSplit,
  kPlan,
  kEvaluation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Dense row-major matrix of doubles. Rows are feature vectors.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  // Appends one row; the first append on an empty 0-column matrix fixes the
  // column count.
  void append_row(std::span<const double> values);
  void reserve_rows(std::size_t n) { data_.reserve(n * cols_); }

  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Row subset in the given order.
Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);

using Rng = std::mt19937_64;

// Mixes a base seed with a stream index (splitmix64 finalizer) so derived
// streams are decorrelated even for adjacent inputs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

// Formats a double with the shortest round-trip representation.
std::string format_double(double value);

}  // namespace sensorplace

#endif  // SENSORPLACE_COMMON_H_
