// Copyright 2026 The advtrain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advtrain/csv.h"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "advtrain/serialization.h"

namespace advtrain {
namespace {

std::vector<std::string> Split(std::string_view line) {
  std::vector<std::string> cells;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return cells;
    start = comma + 1;
  }
}

}  // namespace

std::string FormatDouble(double value) {
  if (value == 0.0) value = 0.0;  // no "-0" in output
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CsvTable::CsvTable(std::vector<std::string> header)
    : header_(std::move(header)) {}

void CsvTable::AddRow(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw std::invalid_argument("csv: row width differs from header");
  }
  for (const std::string& cell : row) {
    if (cell.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("csv: cell contains a separator: " + cell);
    }
  }
  rows_.push_back(std::move(row));
}

int CsvTable::Column(std::string_view name) const {
  for (size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("csv: no column " + std::string(name));
}

double CsvTable::Number(size_t row, std::string_view column) const {
  const std::string& cell = rows_.at(row).at(static_cast<size_t>(Column(column)));
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (cell.empty() || *end != '\0') {
    throw std::invalid_argument("csv: not a number: " + cell);
  }
  return value;
}

std::string CsvTable::ToString() const {
  std::string out;
  auto append = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header_);
  for (const auto& row : rows_) append(row);
  return out;
}

void CsvTable::Write(const std::string& path) const {
  WriteTextFile(path, ToString());
}

CsvTable ParseCsv(std::string_view text) {
  CsvTable table;
  bool first = true;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = end + 1;
    if (line.empty()) continue;
    if (first) {
      table = CsvTable(Split(line));
      first = false;
    } else {
      table.AddRow(Split(line));
    }
  }
  if (first) throw std::invalid_argument("csv: empty document");
  return table;
}

CsvTable ReadCsv(const std::string& path) { return ParseCsv(ReadTextFile(path)); }

}  // namespace advtrain
