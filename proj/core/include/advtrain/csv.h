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

#ifndef ADVTRAIN_CSV_H_
#define ADVTRAIN_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace advtrain {

// Locale-independent "%.17g" rendering, so CSV bytes depend only on the value.
std::string FormatDouble(double value);

// A plain comma-separated table. Cells never contain commas or quotes in the
// files this library writes, so no quoting is performed or accepted.
class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  // Throws std::invalid_argument if the width differs from the header or a
  // cell contains a separator.
  void AddRow(std::vector<std::string> row);

  // Index of a header column; throws std::out_of_range if absent.
  int Column(std::string_view name) const;
  double Number(size_t row, std::string_view column) const;

  std::string ToString() const;
  void Write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Throws std::invalid_argument on ragged rows.
CsvTable ParseCsv(std::string_view text);
CsvTable ReadCsv(const std::string& path);

}  // namespace advtrain

#endif  // ADVTRAIN_CSV_H_
