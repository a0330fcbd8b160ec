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

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "rtbbench/bidders.hpp"

namespace rtbbench {

// Flat "key = value" settings. '#' starts a comment; blank lines are skipped;
// a later assignment of the same key wins.
class Config {
 public:
  Config() = default;

  // Throws DataError with source:line on a line without '='.
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  // Entries of `overlay` replace ours.
  void merge(const Config& overlay);
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  // Conversions throw std::invalid_argument naming the key.
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Copies every bidder key (b0, alm.*, tapid.*, ...) into params. Keys under
  // a bidder prefix that BidderParams does not know are rejected.
  void apply_bidder_params(BidderParams& params) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace rtbbench
