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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rtbbench/common.hpp"
#include "rtbbench/data_model.hpp"

namespace rtbbench {

struct CategoryProfile {
  std::string label;
  double ctr = 0.0;
  double cvr = 0.0;
};

// Duration classes: 1 day, 2-6 days, 7 days, 8-14 days.
inline constexpr std::array<int, 5> kDurationClassDays{0, 1, 6, 7, 14};
// Budget bands in currency units: [0,500), [500,1000), [1000,10000), [10000,50000].
inline constexpr std::array<double, 5> kBudgetBandEdges{0.0, 500.0, 1000.0, 10000.0, 50000.0};

struct SynthConfig {
  std::size_t n_campaigns = 1000;
  AuctionType auction_type = AuctionType::kVcg;
  std::uint64_t seed = 0;
  double gamma = kDefaultGamma;

  std::array<double, 4> duration_weights{};
  std::array<double, 4> budget_weights{};
  // Lower edge used for the first budget band, which starts at 0.
  double min_budget = 10.0;
  // Currency per unit of bid money; bids are gamma^bin in these units.
  double bid_unit = 3e-4;
  // Minor budget units per unit of bid money. Fine enough that per-step
  // charges at the lowest bins do not round to zero.
  double money_scale = 1e4;

  int n_regions = 8;
  int horizon_days = 21;

  // Click-surplus curve over bins 0..max_bin.
  int max_bin = 64;
  double peak_bin = 55.0;
  int peak_jitter = 3;
  double peak_width = 8.0;
  double peak_clicks = 0.5;
  double reserve_bump = 0.1;  // relative to the peak
  double reserve_width = 1.5;
  double noise_sigma = 0.3;
  double contacts_per_click = 0.45;
  double visibility_per_click = 1.7;
  // Peak shift, in bins, at the quietest hour of the day.
  double night_bin_drift = 0.0;
  // Ratio of the full-range cost over a campaign's life to its budget,
  // drawn log-uniform per campaign.
  double pressure_lo = 1.0;
  double pressure_hi = 4.0;

  // Traffic: daily peak at peak_hour, trough at trough_hour; weekly max on
  // weekly_max_dow, min on weekly_min_dow (1 = Sunday).
  double traffic_ratio_lo = 27.0;
  double traffic_ratio_hi = 33.0;
  int peak_hour = 12;
  int trough_hour = 3;
  int weekly_max_dow = 2;
  int weekly_min_dow = 7;
  double weekly_amplitude = 0.15;

  std::vector<CategoryProfile> categories;

  // Defaults for one auction type: duration and budget mixes, curve peak and
  // per-category CTR/CVR means.
  static SynthConfig defaults(AuctionType type);
  // Throws std::invalid_argument on negative weights, weights not summing to
  // 1 (1e-6), empty categories or inconsistent curve parameters.
  void validate() const;
  double minor_per_currency() const { return money_scale / bid_unit; }
};

// Campaign rows only; cheap enough for large calibration runs.
std::vector<Campaign> generate_campaigns(const SynthConfig& cfg);

// Campaigns [first, first + count) with their stats and every traffic
// profile. Campaign i is generated from a seed derived from (seed, i), so any
// sharding yields the same records.
Dataset generate_range(const SynthConfig& cfg, std::size_t first, std::size_t count);
Dataset generate(const SynthConfig& cfg);

std::vector<TrafficProfile> generate_traffic(const SynthConfig& cfg);

// Index of the duration class (0..3) or 4 when longer than 14 days.
int duration_class(Timestamp duration);
// Index of the budget band (0..3) or 4 when outside.
int budget_band(double currency);

// Duration histogram, budget bands, traffic extrema and surplus-by-bin sums.
// minor_per_currency converts budgets back to currency for the band counts.
nlohmann::json describe(const Dataset& d, double minor_per_currency = 1.0);

}  // namespace rtbbench
