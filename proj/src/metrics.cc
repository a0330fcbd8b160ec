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

#include "rtbbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rtbbench/bidders.hpp"
#include "rtbbench/csv.hpp"
#include "rtbbench/kernels.hpp"

namespace rtbbench {

double rmse_t(const CampaignTrajectory& traj, const Campaign& c, const TrafficProfile& p, Timestamp epoch_offset,
              double money_scale, Timestamp step) {
  if (traj.steps.empty()) throw std::invalid_argument("rmse_t: empty trajectory");
  const double b0 = static_cast<double>(traj.initial_budget.minor()) / money_scale;
  const double all = window_share(p, c.campaign_start, c.campaign_end, epoch_offset);
  const double span = static_cast<double>(c.duration());

  std::vector<double> ideal(traj.steps.size());
  std::vector<double> actual(traj.steps.size());
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& s = traj.steps[i];
    const Timestamp t = std::min(s.timestamp + step, c.campaign_end);
    double frac;
    if (all > 0.0) {
      frac = window_share(p, t, c.campaign_end, epoch_offset) / all;
    } else {
      frac = span > 0.0 ? static_cast<double>(c.campaign_end - t) / span : 0.0;
    }
    ideal[i] = b0 * frac;
    actual[i] = static_cast<double>(s.balance_after().minor()) / money_scale;
  }
  return std::sqrt(kernels::sum_squared_diff(ideal, actual) / static_cast<double>(ideal.size()));
}

double scr(const ExperimentResult& results) {
  double total = 0.0;
  for (const auto& c : results.campaigns) total += c.clicks;
  return total;
}

double scr_per_diem(const ExperimentResult& results) {
  double total = 0.0;
  for (const auto& c : results.campaigns) {
    if (c.days() > 0.0) total += c.clicks / c.days();
  }
  return total;
}

namespace {

double spend_units(const CampaignResult& c, double scale) {
  return static_cast<double>(c.spend().minor()) / scale;
}

}  // namespace

std::optional<double> rel_cpc(const ExperimentResult& results, double cpc_limit, CpcAggregation mode) {
  if (!(cpc_limit > 0.0)) throw std::invalid_argument("rel_cpc: C must be positive");
  if (mode == CpcAggregation::kRatioOfSums) {
    double spend = 0.0;
    double clicks = 0.0;
    for (const auto& c : results.campaigns) {
      spend += spend_units(c, results.money_scale);
      clicks += c.clicks;
    }
    if (clicks == 0.0) return std::nullopt;
    return spend / clicks / cpc_limit;
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : results.campaigns) {
    if (c.clicks == 0.0) continue;
    sum += spend_units(c, results.money_scale) / c.clicks;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n) / cpc_limit;
}

std::optional<double> rel_cpc(const ExperimentResult& results, const std::vector<double>& cpc_limits) {
  if (cpc_limits.size() != results.campaigns.size()) {
    throw std::invalid_argument("rel_cpc: one cap per campaign expected");
  }
  double spend = 0.0;
  double allowed = 0.0;
  double clicks = 0.0;
  for (std::size_t i = 0; i < cpc_limits.size(); ++i) {
    if (!(cpc_limits[i] > 0.0)) throw std::invalid_argument("rel_cpc: C must be positive");
    const auto& c = results.campaigns[i];
    spend += spend_units(c, results.money_scale);
    allowed += cpc_limits[i] * c.clicks;
    clicks += c.clicks;
  }
  if (clicks == 0.0) return std::nullopt;
  return spend / allowed;
}

std::vector<OracleItem> oracle_items(const CampaignStats& stats, AuctionType type, double gamma) {
  std::vector<OracleItem> items;
  for (const auto& [period, slice] : stats) {
    double prev_price = 0.0;
    double cum_contacts = 0.0;
    for (std::size_t i = 0; i < slice.size(); ++i) {
      double price;
      if (type == AuctionType::kVcg) {
        price = prev_price + slice.win_bid[i];
      } else {
        cum_contacts += slice.contacts[i];
        price = bid_of(slice.bins[i], gamma) * cum_contacts;
      }
      items.push_back({std::max(0.0, price - prev_price), slice.clicks[i]});
      prev_price = std::max(prev_price, price);
    }
  }
  return items;
}

namespace {

struct GreedyResult {
  double value = 0.0;
  double slack = 0.0;  // sum((c - C v) x)
};

// Fractional knapsack on adjusted values v (1 + lambda C) - lambda c.
GreedyResult greedy(const std::vector<OracleItem>& items, double budget, double cpc_limit, double lambda) {
  const bool capped = std::isfinite(cpc_limit);
  std::vector<std::size_t> order;
  std::vector<double> adjusted(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    adjusted[i] = capped ? it.value * (1.0 + lambda * cpc_limit) - lambda * it.cost : it.value;
    if (adjusted[i] > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = items[a].cost;
    const double cb = items[b].cost;
    if (ca <= 0.0 || cb <= 0.0) return ca <= 0.0 && cb > 0.0;
    return adjusted[a] * cb > adjusted[b] * ca;
  });

  GreedyResult r;
  double left = budget;
  for (std::size_t i : order) {
    const auto& it = items[i];
    double x = 1.0;
    if (it.cost > 0.0) {
      if (left <= 0.0) break;
      x = std::min(1.0, left / it.cost);
      left -= x * it.cost;
    }
    r.value += x * it.value;
    if (capped) r.slack += x * (it.cost - cpc_limit * it.value);
  }
  return r;
}

}  // namespace

double fractional_knapsack(const std::vector<OracleItem>& items, double budget, double cpc_limit) {
  if (!(budget > 0.0)) {
    // Zero-cost items are still free.
    double v = 0.0;
    for (const auto& it : items) {
      if (it.cost <= 0.0 && it.value > 0.0) v += it.value;
    }
    return v;
  }
  const GreedyResult plain = greedy(items, budget, cpc_limit, 0.0);
  if (!std::isfinite(cpc_limit) || plain.slack <= 0.0) return plain.value;

  double lo = 0.0;
  double hi = 1.0;
  GreedyResult at_lo = plain;
  GreedyResult at_hi = greedy(items, budget, cpc_limit, hi);
  while (at_hi.slack > 0.0 && hi < 1e300) {
    lo = hi;
    at_lo = at_hi;
    hi *= 2.0;
    at_hi = greedy(items, budget, cpc_limit, hi);
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const GreedyResult m = greedy(items, budget, cpc_limit, mid);
    if (m.slack > 0.0) {
      lo = mid;
      at_lo = m;
    } else {
      hi = mid;
      at_hi = m;
    }
  }
  const double denom = at_lo.slack - at_hi.slack;
  const double theta = denom > 0.0 ? -at_hi.slack / denom : 0.0;
  return theta * at_lo.value + (1.0 - theta) * at_hi.value;
}

double hindsight_oracle(const Campaign& /*c*/, const CampaignStats& stats, double budget, double cpc_limit,
                        AuctionType type, double gamma) {
  return fractional_knapsack(oracle_items(stats, type, gamma), budget, cpc_limit);
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["algorithm"] = algorithm;
  j["experiment"] = experiment;
  j["auction_type"] = std::string(to_string(auction_type));
  j["campaigns"] = campaigns;
  j["rmse_t"] = rmse_t;
  j["rmse_t_norm"] = rmse_t_norm;
  j["scr"] = scr;
  j["scr_per_diem"] = scr_per_diem;
  j["cpc_limit"] = cpc_limit ? nlohmann::json(*cpc_limit) : nlohmann::json();
  if (cpc_scored) j["rel_cpc"] = rel_cpc ? nlohmann::json(*rel_cpc) : nlohmann::json("undefined");
  j["oracle_clicks"] = oracle_clicks ? nlohmann::json(*oracle_clicks) : nlohmann::json();
  return j;
}

std::vector<std::string> MetricReport::csv_header() {
  return {"algorithm", "experiment", "auction_type", "campaigns", "rmse_t", "rmse_t_norm",
          "scr", "scr_per_diem", "cpc_limit", "rel_cpc", "oracle_clicks"};
}

std::vector<std::string> MetricReport::csv_row() const {
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
  return {algorithm,
          experiment,
          std::string(to_string(auction_type)),
          std::to_string(campaigns),
          csv::format_double(rmse_t),
          csv::format_double(rmse_t_norm),
          csv::format_double(scr),
          csv::format_double(scr_per_diem),
          opt(cpc_limit),
          cpc_scored ? (rel_cpc ? csv::format_double(*rel_cpc) : std::string("undefined")) : std::string(),
          opt(oracle_clicks)};
}

MetricReport make_report(const ExperimentResult& results, const std::string& experiment,
                         std::optional<double> cpc_limit) {
  MetricReport r;
  r.algorithm = results.algorithm;
  r.experiment = experiment;
  r.auction_type = results.auction_type;
  r.campaigns = results.campaigns.size();
  for (const auto& c : results.campaigns) {
    r.rmse_t += c.rmse_t;
    r.rmse_t_norm += c.rmse_t_norm;
  }
  if (r.campaigns > 0) {
    r.rmse_t /= static_cast<double>(r.campaigns);
    r.rmse_t_norm /= static_cast<double>(r.campaigns);
  }
  r.scr = scr(results);
  r.scr_per_diem = scr_per_diem(results);
  r.cpc_limit = cpc_limit;
  if (cpc_limit) {
    r.cpc_scored = true;
    r.rel_cpc = rel_cpc(results, *cpc_limit);
  }
  return r;
}

}  // namespace rtbbench
