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

#include "sensorplace/temporal.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "csv.h"

namespace sensorplace {

using nlohmann::json;

Scheme Scheme::rotating(int d) {
  Scheme s;
  s.family = SchemeFamily::kRotating;
  s.days_per_location = d;
  return s;
}

Scheme Scheme::on_weekday(std::optional<Weekday> day) {
  Scheme s;
  s.family = SchemeFamily::kWeekday;
  s.weekday = day;
  return s;
}

Scheme Scheme::in_season(std::optional<Season> season) {
  Scheme s;
  s.family = SchemeFamily::kSeasonal;
  s.season = season;
  return s;
}

std::string Scheme::label() const {
  switch (family) {
    case SchemeFamily::kRotating:
      return "rotating:" + std::to_string(days_per_location);
    case SchemeFamily::kWeekday:
      return "weekday:" + (weekday ? std::string(to_string(*weekday)) : "evenly");
    case SchemeFamily::kSeasonal:
      return "seasonal:" + (season ? std::string(to_string(*season)) : "evenly");
  }
  return {};
}

Scheme Scheme::parse(std::string_view text) {
  auto fail = [&]() -> Scheme {
    throw Error(ErrorKind::kConfiguration, "unknown temporal scheme '" + std::string(text) + "'");
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return fail();
  const std::string_view family = text.substr(0, colon);
  const std::string_view arg = text.substr(colon + 1);
  if (family == "rotating") {
    auto d = csv::to_int(arg);
    if (!d || *d < 1 || *d > 366) return fail();
    return rotating(static_cast<int>(*d));
  }
  if (family == "weekday") {
    if (arg == "evenly") return on_weekday(std::nullopt);
    auto w = parse_weekday(arg);
    if (!w) return fail();
    return on_weekday(*w);
  }
  if (family == "seasonal") {
    if (arg == "evenly") return in_season(std::nullopt);
    auto s = parse_season(arg);
    if (!s) return fail();
    return in_season(*s);
  }
  return fail();
}

std::string DeploymentPlan::to_csv() const {
  std::ostringstream out;
  out << "segment_id,date,scheme,seed\n";
  const std::string label = scheme.label();
  for (const auto& [id, date] : entries) {
    out << id << ',' << format_date(date) << ',' << label << ',' << seed << '\n';
  }
  return out.str();
}

void DeploymentPlan::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kBundle, "cannot write " + path.string());
  out << to_csv();
}

DeploymentPlan DeploymentPlan::read_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  const std::size_t c_id = t.require("segment_id");
  const std::size_t c_date = t.require("date");
  const std::size_t c_scheme = t.require("scheme");
  const std::size_t c_seed = t.require("seed");
  DeploymentPlan plan;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto id = csv::to_int(row[c_id]);
    auto seed = csv::to_int(row[c_seed]);
    if (!id || !seed) {
      throw Error(ErrorKind::kParse, "plan row " + std::to_string(r + 2) + ": malformed value");
    }
    const Scheme scheme = Scheme::parse(row[c_scheme]);
    if (r == 0) {
      plan.scheme = scheme;
      plan.seed = static_cast<std::uint64_t>(*seed);
    } else if (!(scheme == plan.scheme) || static_cast<std::uint64_t>(*seed) != plan.seed) {
      throw Error(ErrorKind::kPlan, "plan row " + std::to_string(r + 2) +
                                        ": scheme and seed must be constant");
    }
    plan.entries.emplace_back(*id, parse_date(row[c_date]));
  }
  return plan;
}

json DeploymentPlan::to_json() const {
  json subs = json::array();
  for (const DateSubstitution& s : substitutions) {
    subs.push_back({{"segment_id", s.segment},
                    {"requested", format_date(s.requested)},
                    {"used", format_date(s.used)}});
  }
  return {{"scheme", scheme.label()},
          {"seed", seed},
          {"budget", budget()},
          {"window_days", window_days},
          {"substitutions", std::move(subs)}};
}

std::vector<Date> sample_days(const Calendar& calendar, int days, std::uint64_t seed) {
  if (days <= 0) throw Error(ErrorKind::kParameter, "day budget must be positive");
  if (calendar.empty()) throw Error(ErrorKind::kParameter, "calendar is empty");
  Rng rng(seed);
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(days));
  std::vector<Date> pool;
  while (out.size() < static_cast<std::size_t>(days)) {
    pool = calendar.dates();
    std::shuffle(pool.begin(), pool.end(), rng);
    for (Date d : pool) {
      if (out.size() == static_cast<std::size_t>(days)) break;
      out.push_back(d);
    }
  }
  return out;
}

namespace {

// Dates of `calendar` in [first, last], nearest to `target` (earlier on ties).
std::optional<Date> nearest_in(const Calendar& calendar, Date target, Date first, Date last) {
  const auto& dates = calendar.dates();
  auto lo = std::lower_bound(dates.begin(), dates.end(), first);
  auto hi = std::upper_bound(dates.begin(), dates.end(), last);
  std::optional<Date> best;
  int best_gap = 0;
  for (auto it = lo; it != hi; ++it) {
    const int gap = std::abs(days_between(target, *it));
    if (!best || gap < best_gap) {
      best = *it;
      best_gap = gap;
    }
  }
  return best;
}

bool block_has(const std::vector<Date>& dates, std::size_t begin, std::size_t end,
               std::size_t skip, Date value) {
  for (std::size_t i = begin; i < end; ++i) {
    if (i != skip && dates[i] == value) return true;
  }
  return false;
}

DeploymentPlan rotating_plan(int d, std::span<const Date> sampled,
                             std::span<const SegmentId> locations) {
  const std::size_t n = sampled.size();
  const auto per = static_cast<std::size_t>(d);
  const std::size_t needed = (n + per - 1) / per;
  if (needed > locations.size()) {
    throw Error(ErrorKind::kPlan, "rotating:" + std::to_string(d) + " needs " +
                                      std::to_string(needed) + " locations, have " +
                                      std::to_string(locations.size()));
  }
  std::vector<Date> dates(sampled.begin(), sampled.end());
  auto block_begin = [per](std::size_t k) { return (k / per) * per; };
  auto block_end = [per, n](std::size_t k) { return std::min(n, (k / per + 1) * per); };
  for (std::size_t k = 0; k < n; ++k) {
    if (!block_has(dates, block_begin(k), k, k, dates[k])) continue;
    bool fixed = false;
    for (std::size_t step = 1; step < n && !fixed; ++step) {
      const std::size_t j = (k + step) % n;
      if (block_begin(j) == block_begin(k)) continue;
      if (block_has(dates, block_begin(k), block_end(k), k, dates[j])) continue;
      if (block_has(dates, block_begin(j), block_end(j), j, dates[k])) continue;
      std::swap(dates[k], dates[j]);
      fixed = true;
    }
    if (!fixed) {
      throw Error(ErrorKind::kPlan, "cannot assign distinct dates within a rotating block");
    }
  }
  DeploymentPlan plan;
  plan.entries.reserve(n);
  for (std::size_t k = 0; k < n; ++k) plan.entries.emplace_back(locations[k / per], dates[k]);
  return plan;
}

Date season_start(Season s, int cycle_year) {
  using std::chrono::year;
  switch (s) {
    case Season::kSpring: return Date{year{cycle_year}, std::chrono::March, std::chrono::day{1}};
    case Season::kSummer: return Date{year{cycle_year}, std::chrono::June, std::chrono::day{1}};
    case Season::kFall: return Date{year{cycle_year}, std::chrono::September, std::chrono::day{1}};
    case Season::kWinter: return Date{year{cycle_year}, std::chrono::December, std::chrono::day{1}};
  }
  return {};
}

// Seasons cycle from March 1; January and February belong to the winter
// that began in the previous December.
int cycle_year(Date date) {
  const int y = static_cast<int>(date.year());
  const auto m = static_cast<unsigned>(date.month());
  return m <= 2 ? y - 1 : y;
}

Date season_end(Season s, int cy) {
  const Season next = static_cast<Season>((static_cast<int>(s) + 1) % 4);
  const int next_year = s == Season::kWinter ? cy + 1 : cy;
  return add_days(season_start(next, next_year), -1);
}

}  // namespace

DeploymentPlan allocate_plan(const Scheme& scheme, std::span<const Date> dates,
                             std::span<const SegmentId> locations, const Calendar& calendar,
                             std::uint64_t seed) {
  if (dates.empty()) throw Error(ErrorKind::kPlan, "no sampled dates");
  {
    std::vector<SegmentId> sorted(locations.begin(), locations.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::kPlan, "duplicate locations");
    }
  }
  DeploymentPlan plan;
  if (scheme.family == SchemeFamily::kRotating) {
    if (scheme.days_per_location < 1) {
      throw Error(ErrorKind::kPlan, "days per location must be positive");
    }
    plan = rotating_plan(scheme.days_per_location, dates, locations);
  } else {
    if (dates.size() > locations.size()) {
      throw Error(ErrorKind::kPlan, scheme.label() + " needs " + std::to_string(dates.size()) +
                                        " locations, have " + std::to_string(locations.size()));
    }
    for (std::size_t k = 0; k < dates.size(); ++k) {
      const Date sampled = dates[k];
      const SegmentId location = locations[k];
      Date target;
      std::optional<Date> used;
      if (scheme.family == SchemeFamily::kWeekday) {
        const Weekday w = scheme.weekday ? *scheme.weekday : static_cast<Weekday>(k % 7);
        const Date monday = week_start(sampled);
        target = add_days(monday, static_cast<int>(w));
        used = nearest_in(calendar, target, monday, add_days(monday, 6));
      } else {
        const Season s = scheme.season ? *scheme.season : static_cast<Season>(k % 4);
        const Season own = season_of(sampled);
        const int cy = cycle_year(sampled);
        const int offset = days_between(season_start(own, cy), sampled);
        const Date first = season_start(s, cy);
        const Date last = season_end(s, cy);
        target = std::min(add_days(first, offset), last);
        used = nearest_in(calendar, target, first, last);
        if (!used) {
          // Nearest date of the target season in any year.
          int best_gap = 0;
          for (Date d : calendar.dates()) {
            if (season_of(d) != s) continue;
            const int gap = std::abs(days_between(target, d));
            if (!used || gap < best_gap) {
              used = d;
              best_gap = gap;
            }
          }
        }
      }
      if (!used) {
        throw Error(ErrorKind::kPlan, scheme.label() + ": no available date near " +
                                          format_date(target));
      }
      if (*used != target) plan.substitutions.push_back({location, target, *used});
      plan.entries.emplace_back(location, *used);
    }
  }
  plan.scheme = scheme;
  plan.seed = seed;
  return plan;
}

TrainingRows extract_training_rows(const DeploymentPlan& plan, const ModelFeatures& features) {
  return features.entry_rows(plan.entries);
}

}  // namespace sensorplace
