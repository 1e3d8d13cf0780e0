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

// Temporary-deployment plans: single-day sampling, rotating allocation and
// weekday/seasonal date distribution.

#ifndef SENSORPLACE_TEMPORAL_H_
#define SENSORPLACE_TEMPORAL_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sensorplace/calendar.h"
#include "sensorplace/common.h"
#include "sensorplace/model_features.h"

namespace sensorplace {

enum class SchemeFamily { kRotating, kWeekday, kSeasonal };

// Labels: "rotating:<d>", "weekday:<mon..sun|evenly>",
// "seasonal:<spring|summer|fall|winter|evenly>".
struct Scheme {
  SchemeFamily family = SchemeFamily::kRotating;
  int days_per_location = 1;       // rotating only
  std::optional<Weekday> weekday;  // weekday only; nullopt = evenly
  std::optional<Season> season;    // seasonal only; nullopt = evenly

  static Scheme rotating(int days_per_location);
  static Scheme on_weekday(std::optional<Weekday> day);
  static Scheme in_season(std::optional<Season> season);

  std::string label() const;
  // Throws kConfiguration.
  static Scheme parse(std::string_view text);

  friend bool operator==(const Scheme&, const Scheme&) = default;
};

struct DateSubstitution {
  SegmentId segment = 0;
  Date requested;
  Date used;
};

struct DeploymentPlan {
  std::vector<std::pair<SegmentId, Date>> entries;
  Scheme scheme;
  std::uint64_t seed = 0;
  int window_days = 1;  // single-day visits only
  std::vector<DateSubstitution> substitutions;

  std::size_t budget() const { return entries.size(); }

  // CSV columns segment_id,date,scheme,seed.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  static DeploymentPlan read_csv(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

// D dates: successive seeded permutations of the calendar, so every date is
// used once before any is reused. Throws kParameter for D <= 0 or an empty
// calendar.
std::vector<Date> sample_days(const Calendar& calendar, int days, std::uint64_t seed);

// rotating(d): dates[k] goes to locations[k / d]; a block that would repeat a
// date swaps it with the nearest later position of another block.
// weekday / seasonal: one date per location, locations[k] observed on the
// target weekday of the ISO week of dates[k] (or the same offset into the
// target season); "evenly" cycles the target through the week or the four
// seasons by location index. Missing target dates are replaced by the
// nearest available date in the same week (season) and recorded.
// Throws kPlan when there are too few locations or no usable date.
DeploymentPlan allocate_plan(const Scheme& scheme, std::span<const Date> dates,
                             std::span<const SegmentId> locations,
                             const Calendar& calendar, std::uint64_t seed = 0);

TrainingRows extract_training_rows(const DeploymentPlan& plan, const ModelFeatures& features);

}  // namespace sensorplace

#endif  // SENSORPLACE_TEMPORAL_H_
