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

#include "pulsesim/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pulsesim/errors.hpp"

namespace pulsesim {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("row width does not match table " + name);
  }
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& header) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == header) return i;
  }
  throw InvalidArgument("table " + name + " has no column " + header);
}

double Table::number(std::size_t row, std::size_t col) const {
  const Cell& c = rows.at(row).at(col);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  return NAN;
}

std::string format_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string quoted = "\"";
    for (char ch : *s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const double d = std::get<double>(cell);
  if (std::isnan(d)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, r.ptr);
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << format_cell(table.columns[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << "\n";
  }
  return out.str();
}

void write_table(const Table& table, const std::filesystem::path& dir,
                 const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (table.name + ".csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw Error("cannot write " + csv_path.string());
  csv << to_csv(table);

  const nlohmann::json meta = {{"table", table.name},
                               {"columns", table.columns},
                               {"rows", table.rows.size()},
                               {"config_hash", config_hash},
                               {"code_version", kCodeVersion},
                               {"notes", table.notes}};
  const auto meta_path = dir / (table.name + ".meta.json");
  std::ofstream js(meta_path, std::ios::binary);
  if (!js) throw Error("cannot write " + meta_path.string());
  js << meta.dump(2) << "\n";
}

}  // namespace pulsesim
