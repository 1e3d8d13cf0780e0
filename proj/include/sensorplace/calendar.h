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

#ifndef SENSORPLACE_CALENDAR_H_
#define SENSORPLACE_CALENDAR_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sensorplace {

using Date = std::chrono::year_month_day;

// ISO-8601 "YYYY-MM-DD". Throws kParse.
Date parse_date(std::string_view text);
std::string format_date(Date date);
Date add_days(Date date, int days);
int days_between(Date from, Date to);

enum class Weekday { kMon, kTue, kWed, kThu, kFri, kSat, kSun };
enum class Season { kSpring, kSummer, kFall, kWinter };

Weekday weekday_of(Date date);
// Spring Mar-May, summer Jun-Aug, fall Sep-Nov, winter Dec-Feb.
Season season_of(Date date);
// Monday of the ISO week containing `date`.
Date week_start(Date date);

std::string_view to_string(Weekday day);
std::string_view to_string(Season season);
std::optional<Weekday> parse_weekday(std::string_view text);
std::optional<Season> parse_season(std::string_view text);

class Calendar {
 public:
  Calendar() = default;
  // Sorts and deduplicates.
  explicit Calendar(std::vector<Date> dates);

  const std::vector<Date>& dates() const { return dates_; }
  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  bool contains(Date date) const;
  // Position of `date`, or -1.
  int index_of(Date date) const;

  friend bool operator==(const Calendar&, const Calendar&) = default;

 private:
  std::vector<Date> dates_;
};

}  // namespace sensorplace

#endif  // SENSORPLACE_CALENDAR_H_
