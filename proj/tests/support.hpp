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

// Shared fixtures and independent reference implementations for the unit and
// acceptance tests. Nothing here calls into the library's pricing, metric or
// traffic code, so agreement with the library is a real cross-check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rtbbench/common.hpp"
#include "rtbbench/data_model.hpp"
#include "rtbbench/simulation.hpp"
#include "rtbbench/traffic.hpp"

namespace rtbtest {

using rtbbench::AuctionStatRecord;
using rtbbench::Campaign;
using rtbbench::Money;
using rtbbench::Timestamp;

inline Campaign make_campaign(const std::string& id, Timestamp start, Timestamp end, std::int64_t budget_minor,
                              const std::string& category = "1.1", const std::string& region = "r1") {
  Campaign c;
  c.loc_id = "loc" + id;
  c.campaign_id = id;
  c.item_id = "item" + id;
  c.campaign_start = start;
  c.campaign_end = end;
  c.campaign_start_date = rtbbench::format_date(start);
  c.campaign_end_date = rtbbench::format_date(end);
  c.auction_budget = Money(budget_minor);
  c.microcat_ext = "m1";
  c.logical_category = category;
  c.region_id = region;
  return c;
}

inline AuctionStatRecord make_row(const Campaign& c, Timestamp period, std::int32_t bin, double clicks,
                                  double contacts, double win_bid, double ctr = 0.05, double cr = 0.02) {
  AuctionStatRecord r;
  r.campaign_id = c.campaign_id;
  r.item_id = c.item_id;
  r.period = period;
  r.contact_price_bin = bin;
  r.visibility_surplus = 2.0 * clicks;
  r.clicks_surplus = clicks;
  r.contacts_surplus = contacts;
  r.win_bid_surplus = win_bid;
  r.ctr_predicts = ctr;
  r.cr_predicts = cr;
  return r;
}

// Plain row list for one (campaign, period), in arbitrary order.
struct ToyRow {
  std::int32_t bin;
  double clicks;
  double contacts;
  double visibility;
  double win_bid;
};

inline rtbbench::StatSlice to_slice(const std::vector<ToyRow>& rows) {
  rtbbench::StatSlice s;
  for (const auto& r : rows) {
    AuctionStatRecord rec;
    rec.contact_price_bin = r.bin;
    rec.clicks_surplus = r.clicks;
    rec.contacts_surplus = r.contacts;
    rec.visibility_surplus = r.visibility;
    rec.win_bid_surplus = r.win_bid;
    s.push_back(rec);
  }
  s.sort_by_bin();
  return s;
}

// Random toy slice: up to max_bins distinct bins drawn from [lo, hi].
inline std::vector<ToyRow> random_rows(std::mt19937_64& rng, int max_bins, int lo = -2, int hi = 12) {
  std::uniform_int_distribution<int> nbins(1, max_bins);
  std::uniform_int_distribution<int> bin(lo, hi);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  const int n = nbins(rng);
  std::vector<std::int32_t> used;
  std::vector<ToyRow> rows;
  while (static_cast<int>(rows.size()) < n) {
    const int b = bin(rng);
    if (std::find(used.begin(), used.end(), b) != used.end()) continue;
    used.push_back(b);
    rows.push_back({b, val(rng), val(rng), val(rng), val(rng)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Brute-force pricing: walk every row, no sorting assumptions.

inline double brute_vcg_price(const std::vector<ToyRow>& rows, std::int32_t delta) {
  double s = 0.0;
  for (const auto& r : rows) {
    if (r.bin <= delta) s += r.win_bid;
  }
  return s;
}

inline double brute_fp_price(const std::vector<ToyRow>& rows, std::int32_t delta, double bid) {
  double s = 0.0;
  for (const auto& r : rows) {
    if (r.bin <= delta) s += bid * r.contacts;
  }
  return s;
}

struct BruteOutcome {
  double clicks = 0.0, contacts = 0.0, visibility = 0.0;
};

inline BruteOutcome brute_outcomes(const std::vector<ToyRow>& rows, std::int32_t delta) {
  BruteOutcome o;
  for (const auto& r : rows) {
    if (r.bin > delta) continue;
    o.clicks += r.clicks;
    o.contacts += r.contacts;
    o.visibility += r.visibility;
  }
  return o;
}

inline bool rel_close(double a, double b, double rel) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) <= rel * scale || (a == 0.0 && b == 0.0);
}

// ---------------------------------------------------------------------------
// Traffic and metric oracles.

// Share of hour-aligned [from, to) by walking whole hours.
inline double hourly_share(const std::array<double, rtbbench::kSlotsPerWeek>& shares, Timestamp from, Timestamp to) {
  double s = 0.0;
  for (Timestamp t = from; t < to; t += rtbbench::kHour) {
    const Timestamp in_week = ((t % rtbbench::kWeek) + rtbbench::kWeek) % rtbbench::kWeek;
    s += shares[static_cast<std::size_t>(in_week / rtbbench::kHour)];
  }
  return s;
}

// RMSE of balances against B0 * remaining-share fraction, evaluated after
// each hourly step. Money in bid units (minor / scale).
inline double oracle_rmse(const rtbbench::CampaignTrajectory& t, const Campaign& c,
                          const std::array<double, rtbbench::kSlotsPerWeek>& shares, double scale) {
  const double b0 = static_cast<double>(t.initial_budget.minor()) / scale;
  const double all = hourly_share(shares, c.campaign_start, c.campaign_end);
  double acc = 0.0;
  double balance = b0;
  for (const auto& s : t.steps) {
    balance -= static_cast<double>(s.feedback.write_off.minor()) / scale;
    const Timestamp next = std::min(s.timestamp + rtbbench::kHour, c.campaign_end);
    const double ideal = b0 * hourly_share(shares, next, c.campaign_end) / all;
    acc += (ideal - balance) * (ideal - balance);
  }
  return std::sqrt(acc / static_cast<double>(t.steps.size()));
}

inline double oracle_scr(const rtbbench::ExperimentResult& r) {
  double s = 0.0;
  for (const auto& c : r.campaigns) s += c.clicks;
  return s;
}

inline std::optional<double> oracle_rel_cpc(const rtbbench::ExperimentResult& r, double cap) {
  double spend = 0.0, clicks = 0.0;
  for (const auto& c : r.campaigns) {
    spend += static_cast<double>(c.budget.minor() - c.final_balance.minor()) / r.money_scale;
    clicks += c.clicks;
  }
  if (clicks == 0.0) return std::nullopt;
  return (spend / clicks) / cap;
}

// ---------------------------------------------------------------------------
// Hindsight LP by vertex enumeration.
//
// max sum v_i x_i  s.t.  sum c_i x_i <= B,  sum (c_i - C v_i) x_i <= 0,  0 <= x <= 1.
// With two coupling rows a basic optimum has at most two fractional
// variables, so enumerating every 0/1 assignment of the rest and solving the
// active rows for the fractional ones visits all vertices.

struct LpItem {
  double cost;
  double value;
};

// Items per (period, bin increment), computed from raw rows.
inline std::vector<LpItem> lp_items(const std::vector<std::vector<ToyRow>>& periods, bool fp, double gamma) {
  std::vector<LpItem> items;
  for (auto rows : periods) {
    std::sort(rows.begin(), rows.end(), [](const ToyRow& a, const ToyRow& b) { return a.bin < b.bin; });
    double prev = 0.0;
    double cum_contacts = 0.0;
    double cum_win = 0.0;
    for (const auto& r : rows) {
      double price;
      if (fp) {
        cum_contacts += r.contacts;
        price = std::pow(gamma, r.bin) * cum_contacts;
      } else {
        cum_win += r.win_bid;
        price = cum_win;
      }
      items.push_back({std::max(0.0, price - prev), r.clicks});
      prev = std::max(prev, price);
    }
  }
  return items;
}

inline double lp_enumerate(const std::vector<LpItem>& items, double budget, double cap) {
  const std::size_t n = items.size();
  const bool capped = std::isfinite(cap);
  const double tol = 1e-12;
  double best = 0.0;
  auto row_b = [&](std::size_t i) { return items[i].cost; };
  auto row_c = [&](std::size_t i) { return capped ? items[i].cost - cap * items[i].value : 0.0; };
  auto feasible = [&](double used_b, double used_c) {
    return used_b <= budget * (1 + 1e-12) + tol && used_c <= tol * (1.0 + std::fabs(budget));
  };

  std::vector<int> frac;
  auto visit = [&](const std::vector<int>& fixed_one) {
    // fixed_one: indices at 1; frac: fractional set; all else 0.
    double vb = 0.0, vc = 0.0, val = 0.0;
    for (int i : fixed_one) {
      vb += row_b(static_cast<std::size_t>(i));
      vc += row_c(static_cast<std::size_t>(i));
      val += items[static_cast<std::size_t>(i)].value;
    }
    if (frac.empty()) {
      if (feasible(vb, vc)) best = std::max(best, val);
      return;
    }
    if (frac.size() == 1) {
      const auto i = static_cast<std::size_t>(frac[0]);
      for (int active = 0; active < 2; ++active) {
        const double a = active == 0 ? row_b(i) : row_c(i);
        const double rhs = active == 0 ? budget - vb : -vc;
        if (std::fabs(a) < 1e-300) continue;
        const double x = rhs / a;
        if (x < -1e-12 || x > 1 + 1e-12) continue;
        const double xc = std::clamp(x, 0.0, 1.0);
        if (feasible(vb + xc * row_b(i), vc + xc * row_c(i))) best = std::max(best, val + xc * items[i].value);
      }
      return;
    }
    const auto i = static_cast<std::size_t>(frac[0]);
    const auto j = static_cast<std::size_t>(frac[1]);
    // [b_i b_j; c_i c_j] [x_i; x_j] = [B - vb; -vc]
    const double a11 = row_b(i), a12 = row_b(j), a21 = row_c(i), a22 = row_c(j);
    const double det = a11 * a22 - a12 * a21;
    if (std::fabs(det) < 1e-300) return;
    const double r1 = budget - vb, r2 = -vc;
    const double xi = (r1 * a22 - a12 * r2) / det;
    const double xj = (a11 * r2 - a21 * r1) / det;
    if (xi < -1e-12 || xi > 1 + 1e-12 || xj < -1e-12 || xj > 1 + 1e-12) return;
    const double ci = std::clamp(xi, 0.0, 1.0), cj = std::clamp(xj, 0.0, 1.0);
    if (feasible(vb + ci * a11 + cj * a12, vc + ci * a21 + cj * a22)) {
      best = std::max(best, val + ci * items[i].value + cj * items[j].value);
    }
  };

  auto over_rest = [&]() {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::find(frac.begin(), frac.end(), static_cast<int>(k)) == frac.end()) rest.push_back(k);
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rest.size()); ++mask) {
      std::vector<int> ones;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        if (mask >> k & 1U) ones.push_back(static_cast<int>(rest[k]));
      }
      visit(ones);
    }
  };

  frac.clear();
  over_rest();
  for (std::size_t i = 0; i < n; ++i) {
    frac = {static_cast<int>(i)};
    over_rest();
    if (!capped) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      frac = {static_cast<int>(i), static_cast<int>(j)};
      over_rest();
    }
  }
  return best;
}

}  // namespace rtbtest
