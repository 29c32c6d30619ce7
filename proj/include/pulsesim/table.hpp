// Copyright 2026 The pulsesim Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace pulsesim {

inline constexpr const char* kCodeVersion = "0.1.0";

using Cell = std::variant<double, long long, std::string>;

/// A named table; column headers carry their unit in brackets, e.g. "time [ns]".
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void add_row(std::vector<Cell> row);
  std::size_t column(const std::string& header) const;
  double number(std::size_t row, std::size_t col) const;
};

std::string format_cell(const Cell& cell);
std::string to_csv(const Table& table);

/// Writes <dir>/<name>.csv and <dir>/<name>.meta.json.
void write_table(const Table& table, const std::filesystem::path& dir,
                 const std::string& config_hash);

}  // namespace pulsesim
