// Copyright 2026 The rtbbench Authors.
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

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rtbbench::csv {

// Minimal RFC 4180 reader: comma-separated, double-quoted fields may contain
// commas and doubled quotes. Embedded newlines are not supported.
class Reader {
 public:
  Reader(std::istream& in, std::string source_name);

  // Reads the header row. Throws DataError on an empty file.
  void read_header();
  // Index of a required column; throws DataError naming the column.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  // Next data row; false at end of input. Blank lines are skipped.
  bool next();
  std::string_view field(std::size_t index) const;
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

  // "<source>:<line>: <message>"
  [[noreturn]] void fail(std::string_view message) const;

  std::int64_t as_int(std::size_t index) const;
  // Accepts integral floats such as "784791.0".
  std::int64_t as_integral(std::size_t index) const;
  double as_double(std::size_t index) const;

 private:
  std::istream& in_;
  std::string source_;
  std::string raw_;
  std::vector<std::string> fields_;
  std::unordered_map<std::string, std::size_t> header_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_line(std::string_view line);

// Shortest representation that round-trips through from_chars.
std::string format_double(double v);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace rtbbench::csv
