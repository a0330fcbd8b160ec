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

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rtbbench/data_model.hpp"
#include "rtbbench/simulation.hpp"

namespace rtbbench {

// Root-mean-square gap between the balance after each step and the
// traffic-proportional ideal balance B0 * T_left / T_all at that instant.
// Money is in bid units (minor units / money_scale). Throws
// std::invalid_argument for an empty trajectory.
double rmse_t(const CampaignTrajectory& traj, const Campaign& c, const TrafficProfile& p, Timestamp epoch_offset = 0,
              double money_scale = 1.0, Timestamp step = kHour);

// Total expected clicks over all campaigns.
double scr(const ExperimentResult& results);

// Sum over campaigns of clicks per campaign-day.
double scr_per_diem(const ExperimentResult& results);

enum class CpcAggregation {
  kRatioOfSums,       // total spend / total clicks
  kMeanOfCampaigns,   // mean of per-campaign CPC over campaigns with clicks
};

// Realized CPC over the cap C. nullopt is the "undefined" marker returned
// when no clicks were bought. Throws std::invalid_argument for C <= 0.
std::optional<double> rel_cpc(const ExperimentResult& results, double cpc_limit,
                              CpcAggregation mode = CpcAggregation::kRatioOfSums);
// Per-campaign caps (same order as results.campaigns): total spend over
// sum(C_i * clicks_i). Reduces to the single-cap form when all C_i agree.
std::optional<double> rel_cpc(const ExperimentResult& results, const std::vector<double>& cpc_limits);

// One bin increment of one period, as an item of the fractional program.
struct OracleItem {
  double cost = 0.0;
  double value = 0.0;
};

std::vector<OracleItem> oracle_items(const CampaignStats& stats, AuctionType type, double gamma);

// max sum(v x) s.t. sum(c x) <= budget, sum(c x) <= cpc_limit * sum(v x),
// 0 <= x <= 1. Greedy by value density; when the CPC row binds, a bisection
// on its Lagrange multiplier followed by a convex mix of the two bracketing
// greedy solutions.
double fractional_knapsack(const std::vector<OracleItem>& items, double budget,
                           double cpc_limit = std::numeric_limits<double>::infinity());

// Upper bound on expected clicks for one campaign with full hindsight.
// Budget and C are in bid money units.
double hindsight_oracle(const Campaign& c, const CampaignStats& stats, double budget,
                        double cpc_limit, AuctionType type, double gamma = kDefaultGamma);

struct MetricReport {
  std::string algorithm;
  std::string experiment;
  AuctionType auction_type = AuctionType::kVcg;
  std::size_t campaigns = 0;
  double rmse_t = 0.0;       // mean over campaigns, bid money units
  double rmse_t_norm = 0.0;  // mean over campaigns of rmse_t / B0
  double scr = 0.0;
  double scr_per_diem = 0.0;
  bool cpc_scored = false;  // rel_cpc was computed; nullopt then means undefined
  std::optional<double> cpc_limit;
  std::optional<double> rel_cpc;
  std::optional<double> oracle_clicks;

  nlohmann::json to_json() const;
  static std::vector<std::string> csv_header();
  std::vector<std::string> csv_row() const;
};

MetricReport make_report(const ExperimentResult& results, const std::string& experiment,
                         std::optional<double> cpc_limit = std::nullopt);

}  // namespace rtbbench
