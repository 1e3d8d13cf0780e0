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

// Minimal RFC 4180 reader and writer shared by the bundle, plan and report
// code. Not part of the public interface.

#ifndef SENSORPLACE_SRC_CSV_H_
#define SENSORPLACE_SRC_CSV_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sensorplace::csv {

struct Table {
  std::filesystem::path source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // every row has header.size() cells

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws kSchema naming the file when absent.
  std::size_t require(std::string_view name) const;
};

// Throws kBundle when the file cannot be opened, kParse on ragged rows.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, const std::filesystem::path& source = {});

void write_row(std::ostream& out, std::span<const std::string> cells);

// Strict numeric parsers; nullopt on any trailing garbage.
std::optional<double> to_double(std::string_view text);
std::optional<std::int64_t> to_int(std::string_view text);

}  // namespace sensorplace::csv

#endif  // SENSORPLACE_SRC_CSV_H_
