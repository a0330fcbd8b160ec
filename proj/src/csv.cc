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

#include "rtbbench/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rtbbench/common.hpp"

namespace rtbbench::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\n") != std::string_view::npos;
}

}  // namespace

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

Reader::Reader(std::istream& in, std::string source_name) : in_(in), source_(std::move(source_name)) {}

void Reader::fail(std::string_view message) const {
  std::ostringstream os;
  os << source_ << ":" << line_ << ": " << message;
  throw DataError(os.str());
}

void Reader::read_header() {
  while (std::getline(in_, raw_)) {
    ++line_;
    if (line_ == 1 && raw_.size() >= 3 && raw_.compare(0, 3, "\xEF\xBB\xBF") == 0) raw_.erase(0, 3);
    if (trim(raw_).empty()) continue;
    auto names = split_line(raw_);
    for (std::size_t i = 0; i < names.size(); ++i) {
      header_.emplace(std::string(trim(names[i])), i);
    }
    return;
  }
  fail("missing header row");
}

std::optional<std::size_t> Reader::find_column(std::string_view name) const {
  auto it = header_.find(std::string(name));
  if (it == header_.end()) return std::nullopt;
  return it->second;
}

std::size_t Reader::column(std::string_view name) const {
  auto idx = find_column(name);
  if (!idx) {
    std::ostringstream os;
    os << source_ << ": missing column '" << name << "'";
    throw DataError(os.str());
  }
  return *idx;
}

bool Reader::next() {
  while (std::getline(in_, raw_)) {
    ++line_;
    if (trim(raw_).empty()) continue;
    fields_ = split_line(raw_);
    if (fields_.size() < header_.size()) {
      std::ostringstream os;
      os << "expected " << header_.size() << " fields, got " << fields_.size();
      fail(os.str());
    }
    return true;
  }
  return false;
}

std::string_view Reader::field(std::size_t index) const { return trim(fields_.at(index)); }

std::int64_t Reader::as_int(std::size_t index) const {
  auto s = field(index);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail("cannot parse integer '" + std::string(s) + "'");
  }
  return v;
}

std::int64_t Reader::as_integral(std::size_t index) const {
  auto s = field(index);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  double d = as_double(index);
  if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
    fail("expected an integral value, got '" + std::string(s) + "'");
  }
  return static_cast<std::int64_t>(d);
}

double Reader::as_double(std::size_t index) const {
  auto s = field(index);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const auto& f = fields[i];
    if (needs_quotes(f)) {
      out << '"';
      for (char ch : f) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  out << '\n';
}

}  // namespace rtbbench::csv
