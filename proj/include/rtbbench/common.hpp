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

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtbbench {

// Seconds on the dataset's (shifted) unix-like clock.
using Timestamp = std::int64_t;

inline constexpr Timestamp kHour = 3600;
inline constexpr Timestamp kDay = 24 * kHour;
inline constexpr Timestamp kWeek = 7 * kDay;
inline constexpr int kSlotsPerWeek = 168;

inline constexpr double kDefaultGamma = 1.2;

// Integer minor units. All budget arithmetic in the engine goes through this
// type so that conservation is exact.
class Money {
 public:
  constexpr Money() = default;
  constexpr explicit Money(std::int64_t minor) : minor_(minor) {}

  constexpr std::int64_t minor() const { return minor_; }

  constexpr Money operator+(Money o) const { return Money(minor_ + o.minor_); }
  constexpr Money operator-(Money o) const { return Money(minor_ - o.minor_); }
  constexpr Money& operator+=(Money o) {
    minor_ += o.minor_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    minor_ -= o.minor_;
    return *this;
  }
  constexpr auto operator<=>(const Money&) const = default;

 private:
  std::int64_t minor_ = 0;
};

enum class AuctionType { kVcg, kFp };

std::string_view to_string(AuctionType t);
AuctionType parse_auction_type(std::string_view s);

// Raised for malformed input files; the message carries file:line context.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rtbbench
