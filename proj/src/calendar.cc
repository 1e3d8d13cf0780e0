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

#include "sensorplace/calendar.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

#include "sensorplace/common.h"

namespace sensorplace {

using std::chrono::days;
using std::chrono::sys_days;

Date parse_date(std::string_view text) {
  auto fail = [&]() -> Date {
    throw Error(ErrorKind::kParse, "invalid ISO date '" + std::string(text) + "'");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return fail();
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc() && p == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return fail();
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return fail();
  return date;
}

std::string format_date(Date date) {
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf.data();
}

Date add_days(Date date, int n) { return Date{sys_days{date} + days{n}}; }

int days_between(Date from, Date to) {
  return static_cast<int>((sys_days{to} - sys_days{from}).count());
}

Weekday weekday_of(Date date) {
  const std::chrono::weekday wd{sys_days{date}};
  return static_cast<Weekday>(wd.iso_encoding() - 1);
}

Season season_of(Date date) {
  switch (static_cast<unsigned>(date.month())) {
    case 3: case 4: case 5: return Season::kSpring;
    case 6: case 7: case 8: return Season::kSummer;
    case 9: case 10: case 11: return Season::kFall;
    default: return Season::kWinter;
  }
}

Date week_start(Date date) {
  return add_days(date, -static_cast<int>(weekday_of(date)));
}

namespace {
constexpr std::array<std::string_view, 7> kWeekdays = {"mon", "tue", "wed", "thu",
                                                       "fri", "sat", "sun"};
constexpr std::array<std::string_view, 4> kSeasons = {"spring", "summer", "fall",
                                                      "winter"};
}  // namespace

std::string_view to_string(Weekday day) { return kWeekdays[static_cast<int>(day)]; }
std::string_view to_string(Season season) { return kSeasons[static_cast<int>(season)]; }

std::optional<Weekday> parse_weekday(std::string_view text) {
  for (std::size_t i = 0; i < kWeekdays.size(); ++i) {
    if (kWeekdays[i] == text) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

std::optional<Season> parse_season(std::string_view text) {
  for (std::size_t i = 0; i < kSeasons.size(); ++i) {
    if (kSeasons[i] == text) return static_cast<Season>(i);
  }
  if (text == "autumn") return Season::kFall;
  return std::nullopt;
}

Calendar::Calendar(std::vector<Date> dates) : dates_(std::move(dates)) {
  std::sort(dates_.begin(), dates_.end());
  dates_.erase(std::unique(dates_.begin(), dates_.end()), dates_.end());
}

bool Calendar::contains(Date date) const {
  return std::binary_search(dates_.begin(), dates_.end(), date);
}

int Calendar::index_of(Date date) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
  if (it == dates_.end() || *it != date) return -1;
  return static_cast<int>(it - dates_.begin());
}

}  // namespace sensorplace
