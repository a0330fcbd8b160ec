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

#include "rtbbench/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "rtbbench/csv.hpp"
#include "rtbbench/kernels.hpp"
#include "rtbbench/metrics.hpp"

namespace rtbbench {

SimulationConfig SimulationConfig::for_dataset(const Dataset& d) {
  SimulationConfig cfg;
  cfg.auction_type = d.auction_type();
  cfg.gamma = d.gamma();
  return cfg;
}

namespace {

kernels::SliceColumns columns(const StatSlice& s) {
  return {s.bins, s.clicks, s.contacts, s.visibility, s.win_bid};
}

}  // namespace

double vcg_expected_price(const StatSlice& bins, std::int32_t delta) {
  return kernels::masked_sum_le(bins.bins, bins.win_bid, delta);
}

double fp_expected_price(const StatSlice& bins, std::int32_t delta, double bid, FpPricing mode) {
  if (mode == FpPricing::kExactBin) {
    auto it = std::lower_bound(bins.bins.begin(), bins.bins.end(), delta);
    if (it == bins.bins.end() || *it != delta) return 0.0;
    return bid * bins.contacts[static_cast<std::size_t>(it - bins.bins.begin())];
  }
  return bid * kernels::masked_sum_le(bins.bins, bins.contacts, delta);
}

StepOutcomes step_outcomes(const StatSlice& bins, std::int32_t delta) {
  const kernels::OutcomeSums s = kernels::outcome_sums_le(columns(bins), delta);
  StepOutcomes out{s.clicks, s.contacts, s.visibility, 0.0};
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins.bins[i] > delta) continue;
    out.wins += std::isnan(bins.auction_count[i]) ? 1.0 : bins.auction_count[i];
  }
  return out;
}

Money round_money(double minor_units) {
  // nearbyint honours the default round-to-nearest-even mode.
  return Money(static_cast<std::int64_t>(std::nearbyint(minor_units)));
}

CampaignTrajectory run_campaign(const Campaign& c, const Dataset& d, Bidder& bidder, const SimulationConfig& cfg) {
  if (cfg.step <= 0) throw std::invalid_argument("simulation step must be positive");
  if (!(cfg.money_scale > 0.0)) throw std::invalid_argument("money_scale must be positive");

  CampaignTrajectory traj;
  traj.campaign_id = c.campaign_id;
  traj.initial_budget = c.auction_budget;

  const TrafficProfile* profile = d.profile(c.region_id);
  TrafficProfile fallback;
  if (!profile) {
    fallback = TrafficProfile::uniform(c.region_id);
    profile = &fallback;
    traj.uniform_traffic_fallback = true;
  }

  const double scale = cfg.money_scale;
  const double budget = static_cast<double>(c.auction_budget.minor()) / scale;
  Money balance = c.auction_budget;
  bool finished = balance.minor() <= 0;
  if (finished) traj.exhausted_at = 0;

  std::int32_t last_bin = bin_of(bidder.params().b0, cfg.gamma);
  StepFeedback last;

  for (Timestamp now = c.campaign_start; now < c.campaign_end; now += cfg.step) {
    StepRecord rec;
    rec.timestamp = now;
    rec.balance = balance;
    if (finished) {
      traj.steps.push_back(rec);
      continue;
    }

    BidderObservation obs;
    obs.now = now;
    obs.budget = budget;
    obs.balance = static_cast<double>(balance.minor()) / scale;
    obs.spend_last_step = static_cast<double>(last.write_off.minor()) / scale;
    obs.clicks_last_step = last.clicks;
    obs.contacts_last_step = last.contacts;
    obs.traffic = window_for_campaign(*profile, c, now, d.epoch_offset(), cfg.step);
    const CtrCvr est = d.estimate_ctr_cvr(c.logical_category, slot_of(now, d.epoch_offset()),
                                          last_bin - cfg.ctr_bin_halfwidth, last_bin + cfg.ctr_bin_halfwidth);
    obs.ctr = est.ctr;
    obs.cvr = est.cvr;

    const double bid = bidder.next_bid(obs);
    StepFeedback fb;
    fb.bid = bid;
    const StatSlice* slice = d.slice_at(c.campaign_id, now, cfg.step);
    if (!slice) {
      fb.missing_stats = true;
      ++traj.missing_stat_steps;
    }
    if (bid > 0.0 && std::isfinite(bid)) {
      const std::int32_t delta = bin_of(bid, cfg.gamma);
      fb.bin_played = delta;
      last_bin = delta;
      if (slice) {
        const double price = cfg.auction_type == AuctionType::kVcg
                                 ? vcg_expected_price(*slice, delta)
                                 : fp_expected_price(*slice, delta, bid, cfg.fp_pricing);
        const StepOutcomes out = step_outcomes(*slice, delta);
        const Money charge = round_money(price * scale);
        double fraction = 1.0;
        if (charge > balance) {
          fraction = static_cast<double>(balance.minor()) / static_cast<double>(charge.minor());
          fb.write_off = balance;
        } else {
          fb.write_off = charge;
        }
        fb.clicks = out.clicks * fraction;
        fb.contacts = out.contacts * fraction;
        fb.visibility = out.visibility * fraction;
        fb.wins = out.wins * fraction;
      }
    }

    balance -= fb.write_off;
    traj.total_clicks += fb.clicks;
    traj.total_contacts += fb.contacts;
    traj.total_visibility += fb.visibility;
    traj.total_wins += fb.wins;
    rec.feedback = fb;
    traj.steps.push_back(rec);
    last = fb;
    if (balance.minor() <= 0) {
      finished = true;
      traj.exhausted_at = static_cast<std::int64_t>(traj.steps.size()) - 1;
    }
  }
  traj.final_balance = balance;
  return traj;
}

bool CampaignFilter::matches(const Campaign& c) const {
  if (!category_matches(c.logical_category, category_prefix)) return false;
  if (duration == DurationClass::kUpToOneDay && c.duration() > kDay) return false;
  if (duration == DurationClass::kOverOneDay && c.duration() <= kDay) return false;
  if (start_from && c.campaign_start < *start_from) return false;
  if (start_until && c.campaign_start >= *start_until) return false;
  if (campaign_ids && std::find(campaign_ids->begin(), campaign_ids->end(), c.campaign_id) == campaign_ids->end()) {
    return false;
  }
  return true;
}

ExperimentResult run_experiment(const Dataset& d, const BidderFactory& factory, const SimulationConfig& cfg,
                                const CampaignFilter& filter) {
  std::vector<const Campaign*> selected;
  for (const auto& c : d.campaigns()) {
    if (filter.matches(c)) selected.push_back(&c);
  }
  if (selected.empty()) throw std::invalid_argument("campaign filter selected no campaigns");

  ExperimentResult result;
  result.auction_type = cfg.auction_type;
  result.money_scale = cfg.money_scale;
  result.campaigns.resize(selected.size());

  auto run_one = [&](std::size_t i) {
    const Campaign& c = *selected[i];
    BidderParams params = factory(c);
    params.gamma = cfg.gamma;
    Bidder bidder(params);
    CampaignTrajectory traj = run_campaign(c, d, bidder, cfg);
    CampaignResult& r = result.campaigns[i];
    r.campaign_id = c.campaign_id;
    r.category = c.logical_category;
    r.duration = c.duration();
    r.budget = c.auction_budget;
    r.final_balance = traj.final_balance;
    r.clicks = traj.total_clicks;
    r.contacts = traj.total_contacts;
    r.visibility = traj.total_visibility;
    r.wins = traj.total_wins;
    r.steps = static_cast<std::int64_t>(traj.steps.size());
    r.exhausted_at = traj.exhausted_at;
    if (!traj.steps.empty()) {
      const TrafficProfile* p = d.profile(c.region_id);
      const TrafficProfile fallback = TrafficProfile::uniform(c.region_id);
      r.rmse_t = rmse_t(traj, c, p ? *p : fallback, d.epoch_offset(), cfg.money_scale, cfg.step);
      const double b0 = static_cast<double>(c.auction_budget.minor()) / cfg.money_scale;
      r.rmse_t_norm = b0 > 0.0 ? r.rmse_t / b0 : 0.0;
    }
    if (cfg.keep_trajectories) r.trajectory = std::move(traj);
  };

  const std::size_t jobs = static_cast<std::size_t>(std::max(1, cfg.jobs));
  if (jobs == 1 || selected.size() == 1) {
    for (std::size_t i = 0; i < selected.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, selected.size()); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < selected.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  return result;
}

CpcPolicy CpcPolicy::parse(const std::string& text) {
  CpcPolicy p;
  if (text == "none" || text.empty()) return p;
  if (text == "category-div-10") {
    p.kind = Kind::kCategoryDiv10;
  } else if (text == "budget") {
    p.kind = Kind::kBudget;
  } else if (text.rfind("fixed:", 0) == 0) {
    p.kind = Kind::kFixed;
    std::size_t used = 0;
    try {
      p.value = std::stod(text.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 6 || !(p.value > 0.0)) {
      throw std::invalid_argument("bad CPC cap: " + text);
    }
  } else {
    throw std::invalid_argument("unknown CPC policy: " + text);
  }
  return p;
}

std::string CpcPolicy::to_string() const {
  switch (kind) {
    case Kind::kNone:
      return "none";
    case Kind::kFixed:
      return "fixed:" + csv::format_double(value);
    case Kind::kCategoryDiv10:
      return "category-div-10";
    case Kind::kBudget:
      return "budget";
  }
  return "none";
}

double category_mean_cpc(const Dataset& d, const std::string& category) {
  double spend = 0.0;
  double clicks = 0.0;
  for (const auto& c : d.campaigns()) {
    if (c.logical_category != category) continue;
    const CampaignStats* stats = d.campaign_stats(c.campaign_id);
    if (!stats) continue;
    for (const auto& [period, slice] : *stats) {
      spend += kernels::sum(slice.win_bid);
      clicks += kernels::sum(slice.clicks);
    }
  }
  if (!(clicks > 0.0)) throw std::invalid_argument("category " + category + " has no clicks");
  return spend / clicks;
}

std::optional<double> cpc_cap(const CpcPolicy& policy, const Campaign& c, const Dataset& d, double money_scale) {
  switch (policy.kind) {
    case CpcPolicy::Kind::kNone:
      return std::nullopt;
    case CpcPolicy::Kind::kFixed:
      return policy.value;
    case CpcPolicy::Kind::kCategoryDiv10:
      return category_mean_cpc(d, c.logical_category) / 10.0;
    case CpcPolicy::Kind::kBudget:
      return static_cast<double>(c.auction_budget.minor()) / money_scale;
  }
  return std::nullopt;
}

BidderFactory make_bidder_factory(const BidderParams& base, const CpcPolicy& policy, const Dataset& d,
                                  double money_scale) {
  std::map<std::string, double> means;
  if (policy.kind == CpcPolicy::Kind::kCategoryDiv10) {
    for (const auto& c : d.campaigns()) {
      if (means.count(c.logical_category)) continue;
      try {
        means[c.logical_category] = category_mean_cpc(d, c.logical_category);
      } catch (const std::invalid_argument&) {
        // Reported when a campaign of this category is actually run.
      }
    }
  }
  return [base, policy, means, money_scale](const Campaign& c) {
    BidderParams p = base;
    switch (policy.kind) {
      case CpcPolicy::Kind::kNone:
        break;
      case CpcPolicy::Kind::kFixed:
        p.cpc_limit = policy.value;
        break;
      case CpcPolicy::Kind::kCategoryDiv10:
        if (!means.count(c.logical_category)) {
          throw std::invalid_argument("category " + c.logical_category + " has no clicks; no mean CPC");
        }
        p.cpc_limit = means.at(c.logical_category) / 10.0;
        break;
      case CpcPolicy::Kind::kBudget:
        p.cpc_limit = static_cast<double>(c.auction_budget.minor()) / money_scale;
        break;
    }
    return p;
  };
}

nlohmann::json ExperimentResult::to_json() const {
  nlohmann::json j;
  j["auction_type"] = std::string(to_string(auction_type));
  j["algorithm"] = algorithm;
  j["money_scale"] = money_scale;
  auto arr = nlohmann::json::array();
  for (const auto& c : campaigns) {
    arr.push_back({{"campaign_id", c.campaign_id},
                   {"category", c.category},
                   {"duration_s", c.duration},
                   {"budget", c.budget.minor()},
                   {"final_balance", c.final_balance.minor()},
                   {"spend", c.spend().minor()},
                   {"clicks", c.clicks},
                   {"contacts", c.contacts},
                   {"visibility", c.visibility},
                   {"wins", c.wins},
                   {"rmse_t", c.rmse_t},
                   {"rmse_t_norm", c.rmse_t_norm},
                   {"steps", c.steps},
                   {"exhausted_at", c.exhausted_at}});
  }
  j["campaigns"] = std::move(arr);
  return j;
}

void write_trajectory_csv(std::ostream& out, const CampaignTrajectory& t) {
  csv::write_row(out, {"timestamp", "balance", "bin", "write_off", "clicks", "contacts", "visibility", "wins"});
  for (const auto& s : t.steps) {
    const auto& f = s.feedback;
    csv::write_row(out, {std::to_string(s.timestamp), std::to_string(s.balance.minor()),
                         f.bin_played ? std::to_string(*f.bin_played) : std::string(),
                         std::to_string(f.write_off.minor()), csv::format_double(f.clicks),
                         csv::format_double(f.contacts), csv::format_double(f.visibility),
                         csv::format_double(f.wins)});
  }
}

}  // namespace rtbbench
