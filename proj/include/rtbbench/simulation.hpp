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
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rtbbench/bidders.hpp"
#include "rtbbench/common.hpp"
#include "rtbbench/data_model.hpp"

namespace rtbbench {

// How a first-price step is charged. kCumulative sums AuctionContactsSurplus
// over every bin up to the played one; kExactBin uses the played bin only.
enum class FpPricing { kCumulative, kExactBin };

struct SimulationConfig {
  AuctionType auction_type = AuctionType::kVcg;
  Timestamp step = kHour;
  double gamma = kDefaultGamma;
  std::optional<double> cpc_limit;  // informational; bidders and metrics read C
  std::uint64_t seed = 0;
  // Minor budget units per unit of bid / surplus money.
  double money_scale = 1.0;
  FpPricing fp_pricing = FpPricing::kCumulative;
  // CTR/CVR lookups use [last_bin - w, last_bin + w].
  int ctr_bin_halfwidth = 2;
  bool keep_trajectories = true;
  int jobs = 1;

  static SimulationConfig for_dataset(const Dataset& d);
};

struct StepOutcomes {
  double clicks = 0.0;
  double contacts = 0.0;
  double visibility = 0.0;
  double wins = 0.0;
};

struct StepFeedback {
  Money write_off;
  double clicks = 0.0;
  double contacts = 0.0;
  double visibility = 0.0;
  double wins = 0.0;
  std::optional<std::int32_t> bin_played;  // empty when abstaining or finished
  double bid = 0.0;
  bool missing_stats = false;
};

struct StepRecord {
  Timestamp timestamp = 0;
  Money balance;  // before the step's charge
  StepFeedback feedback;

  Money balance_after() const { return balance - feedback.write_off; }
};

struct CampaignTrajectory {
  std::string campaign_id;
  Money initial_budget;
  std::vector<StepRecord> steps;
  Money final_balance;
  double total_clicks = 0.0;
  double total_contacts = 0.0;
  double total_visibility = 0.0;
  double total_wins = 0.0;
  // Index of the step that exhausted the budget, or -1.
  std::int64_t exhausted_at = -1;
  std::int64_t missing_stat_steps = 0;
  bool uniform_traffic_fallback = false;

  Money total_spend() const { return initial_budget - final_balance; }
};

// Sum of AuctionWinBidSurplus over rows with bin <= delta.
double vcg_expected_price(const StatSlice& bins, std::int32_t delta);
// bid times AuctionContactsSurplus summed over rows with bin <= delta
// (kCumulative) or taken at bin == delta (kExactBin).
double fp_expected_price(const StatSlice& bins, std::int32_t delta, double bid,
                         FpPricing mode = FpPricing::kCumulative);
StepOutcomes step_outcomes(const StatSlice& bins, std::int32_t delta);

// Round half to even, to integer minor units.
Money round_money(double minor_units);

// Hourly replay from campaign_start to campaign_end. Once the balance hits 0
// the bidder is no longer consulted and every later step is all-zero.
CampaignTrajectory run_campaign(const Campaign& c, const Dataset& d, Bidder& bidder, const SimulationConfig& cfg);

enum class DurationClass { kAny, kUpToOneDay, kOverOneDay };

struct CampaignFilter {
  std::string category_prefix;
  DurationClass duration = DurationClass::kAny;
  std::optional<Timestamp> start_from;  // campaign_start >= start_from
  std::optional<Timestamp> start_until;  // campaign_start < start_until
  std::optional<std::vector<std::string>> campaign_ids;

  bool matches(const Campaign& c) const;
};

struct CampaignResult {
  std::string campaign_id;
  std::string category;
  Timestamp duration = 0;
  Money budget;
  Money final_balance;
  double clicks = 0.0;
  double contacts = 0.0;
  double visibility = 0.0;
  double wins = 0.0;
  double rmse_t = 0.0;       // bid money units
  double rmse_t_norm = 0.0;  // rmse_t / B0
  std::int64_t steps = 0;
  std::int64_t exhausted_at = -1;
  std::optional<CampaignTrajectory> trajectory;

  Money spend() const { return budget - final_balance; }
  double days() const { return static_cast<double>(duration) / static_cast<double>(kDay); }
};

struct ExperimentResult {
  AuctionType auction_type = AuctionType::kVcg;
  double money_scale = 1.0;
  std::string algorithm;
  std::vector<CampaignResult> campaigns;  // in campaign_id order

  nlohmann::json to_json() const;
};

using BidderFactory = std::function<BidderParams(const Campaign&)>;

// How the per-campaign CPC cap C is chosen.
struct CpcPolicy {
  enum class Kind {
    kNone,           // bidders fall back to their own default
    kFixed,          // one value for every campaign
    kCategoryDiv10,  // category mean CPC / 10
    kBudget,         // C = B0, which leaves the CPC loops inert
  };
  Kind kind = Kind::kNone;
  double value = 0.0;

  // "fixed:<v>", "category-div-10", "budget" or "none".
  static CpcPolicy parse(const std::string& text);
  std::string to_string() const;
};

// Sum of AuctionWinBidSurplus over sum of AuctionClicksSurplus across every
// record of the campaigns in `category`, in bid money units. Throws
// std::invalid_argument when the category has no clicks.
double category_mean_cpc(const Dataset& d, const std::string& category);

// Cap for one campaign, in bid money units; nullopt for kNone.
std::optional<double> cpc_cap(const CpcPolicy& policy, const Campaign& c, const Dataset& d, double money_scale);

// Copies `base` and sets its cpc_limit per campaign. Category means are
// computed once, up front.
BidderFactory make_bidder_factory(const BidderParams& base, const CpcPolicy& policy, const Dataset& d,
                                  double money_scale);

// Throws std::invalid_argument when the filter selects no campaign. Results
// do not depend on cfg.jobs.
ExperimentResult run_experiment(const Dataset& d, const BidderFactory& factory, const SimulationConfig& cfg,
                                const CampaignFilter& filter = {});

// timestamp,balance,bin,write_off,clicks,contacts,visibility,wins
void write_trajectory_csv(std::ostream& out, const CampaignTrajectory& t);

}  // namespace rtbbench
