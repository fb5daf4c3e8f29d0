// Copyright 2026 The IIDA Lab Authors
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

#ifndef IIDA_COMMON_TEXT_H_
#define IIDA_COMMON_TEXT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace iida {

// Shortest decimal form that parses back to the identical double.
std::string FormatDouble(double value);

// Minimal CSV writer: rows are joined with commas, no quoting (all fields
// written by this project are numeric or simple identifiers).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void AddRow(std::vector<std::string> fields);
  std::string ToString() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int Column(std::string_view name) const;  // -1 if absent
};

// Replaces the file's contents; throws std::runtime_error on I/O failure.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

CsvTable ReadCsv(const std::filesystem::path& path);
std::vector<std::string> Split(std::string_view text, char separator);

}  // namespace iida

#endif  // IIDA_COMMON_TEXT_H_
