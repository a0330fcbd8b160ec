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

#include "rtbbench/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rtbbench/bidders.hpp"
#include "rtbbench/random.hpp"

namespace rtbbench {

namespace {

struct CategoryRow {
  const char* label;
  double fp_ctr, fp_cvr, vcg_ctr, vcg_cvr;
};

// Per-category CTR / CVR means.
constexpr CategoryRow kCategories[] = {
    {"1.0", 3.98e-02, 2.25e-02, 7.56e-02, 3.43e-02},  {"1.1", 2.62e-02, 2.01e-02, 3.47e-02, 1.64e-02},
    {"1.11", 4.74e-02, 3.67e-02, 8.74e-02, 4.35e-02}, {"1.13", 2.66e-02, 2.22e-02, 5.10e-02, 2.67e-02},
    {"1.14", 2.19e-02, 3.75e-02, 5.07e-02, 3.99e-02}, {"1.15", 3.81e-02, 1.91e-02, 4.37e-02, 2.06e-02},
    {"1.17", 1.97e-02, 1.73e-02, 5.38e-02, 3.42e-02}, {"1.18", 2.47e-02, 3.17e-02, 5.62e-02, 3.99e-02},
    {"1.19", 2.86e-02, 4.92e-02, 6.53e-02, 3.37e-02}, {"1.2", 2.63e-02, 2.77e-02, 4.44e-02, 3.51e-02},
    {"1.21", 3.74e-02, 2.05e-02, 4.35e-02, 2.38e-02}, {"1.3", 2.64e-02, 1.94e-02, 5.54e-02, 1.85e-02},
    {"1.7", 2.84e-02, 4.16e-02, 4.19e-02, 3.27e-02},  {"1.8", 2.82e-02, 3.18e-02, 4.63e-02, 4.07e-02},
    {"2.12", 1.93e-02, 3.55e-02, 5.31e-02, 1.10e-02}, {"2.22", 2.02e-02, 2.66e-02, 1.53e-01, 6.63e-02},
    {"2.3", 1.68e-02, 2.27e-02, 7.31e-02, 1.87e-02},  {"2.5", 1.54e-02, 2.60e-02, 4.38e-02, 2.99e-02},
    {"3.1", 5.78e-02, 2.30e-01, 5.82e-02, 2.04e-01},  {"3.17", 5.97e-02, 7.47e-02, 5.58e-02, 3.97e-02},
    {"3.2", 4.95e-02, 1.44e-01, 4.99e-02, 1.22e-01},  {"3.23", 5.34e-02, 1.40e-01, 3.41e-02, 6.66e-02},
    {"3.25", 3.83e-02, 1.34e-01, 6.21e-02, 1.35e-01}, {"3.27", 4.95e-02, 2.10e-01, 4.92e-02, 1.77e-01},
    {"3.3", 4.98e-02, 1.09e-01, 5.16e-02, 1.01e-01},  {"3.9", 5.34e-02, 9.89e-02, 7.34e-02, 8.68e-02},
    {"4.24", 3.53e-02, 2.23e-01, 3.95e-02, 1.59e-01}, {"4.28", 2.42e-02, 1.52e-02, 4.47e-02, 1.91e-02},
    {"4.4", 9.34e-02, 1.36e-01, 5.49e-02, 6.40e-02},
};

// Stream ids for derive_seed.
constexpr std::uint64_t kTrafficStream = 0xffffffffULL;

int pick(const std::array<double, 4>& weights, double u) {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += weights[static_cast<std::size_t>(i)];
    if (u < acc) return i;
  }
  for (int i = 3; i >= 0; --i) {
    if (weights[static_cast<std::size_t>(i)] > 0.0) return i;
  }
  return 0;
}

std::string padded(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06zu", prefix, i);
  return buf;
}

// -1 at `trough`, +1 at `peak`, cosine in between, on a cycle of `period`.
double asymmetric_wave(int x, int trough, int peak, int period) {
  const int rise = ((peak - trough) % period + period) % period;
  const int since_trough = ((x - trough) % period + period) % period;
  if (since_trough <= rise) {
    return -std::cos(std::numbers::pi * since_trough / rise);
  }
  const int fall = period - rise;
  return std::cos(std::numbers::pi * (since_trough - rise) / fall);
}

double daily_level(const SynthConfig& cfg, int hour) {
  return (asymmetric_wave(hour, cfg.trough_hour, cfg.peak_hour, 24) + 1.0) / 2.0;  // 0..1
}

struct Drawn {
  Campaign campaign;
  double pressure = 1.0;
  int peak_shift = 0;
  std::size_t category = 0;
};

Drawn draw_campaign(const SynthConfig& cfg, std::size_t index, std::mt19937_64& rng) {
  Drawn out;
  Campaign& c = out.campaign;
  c.campaign_id = padded('c', index);
  c.item_id = padded('i', index);

  const int dclass = pick(cfg.duration_weights, uniform01(rng));
  int days = kDurationClassDays[static_cast<std::size_t>(dclass + 1)];
  const int lo_days = kDurationClassDays[static_cast<std::size_t>(dclass)] + 1;
  if (days > lo_days) {
    days = lo_days + static_cast<int>(uniform01(rng) * (days - lo_days + 1));
  }
  const int hours = days * 24;
  const int horizon = std::max(cfg.horizon_days * 24, hours);
  const int start_hour = static_cast<int>(uniform01(rng) * (horizon - hours + 1));
  c.campaign_start = static_cast<Timestamp>(start_hour) * kHour;
  c.campaign_end = c.campaign_start + static_cast<Timestamp>(hours) * kHour;
  c.campaign_start_date = format_date(c.campaign_start);
  c.campaign_end_date = format_date(c.campaign_end);

  const int band = pick(cfg.budget_weights, uniform01(rng));
  const double blo = std::max(kBudgetBandEdges[static_cast<std::size_t>(band)], cfg.min_budget);
  const double bhi = kBudgetBandEdges[static_cast<std::size_t>(band + 1)];
  double currency = std::exp(uniform(rng, std::log(blo), std::log(bhi)));
  auto minor = static_cast<std::int64_t>(std::floor(currency * cfg.minor_per_currency()));
  // Keep the drawn value inside its band after flooring to minor units.
  minor = std::max<std::int64_t>(minor, static_cast<std::int64_t>(std::ceil(blo * cfg.minor_per_currency())));
  c.auction_budget = Money(std::max<std::int64_t>(minor, 1));

  out.category = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cfg.categories.size()));
  out.category = std::min(out.category, cfg.categories.size() - 1);
  c.logical_category = cfg.categories[out.category].label;
  c.microcat_ext = "m" + c.logical_category;
  const int region = static_cast<int>(uniform01(rng) * cfg.n_regions);
  c.region_id = "r" + std::to_string(std::min(region, cfg.n_regions - 1) + 1);
  c.loc_id = "l" + c.region_id.substr(1);

  std::array<double, 4> p{};
  double total = 0.0;
  for (auto& x : p) {
    x = 0.05 + uniform01(rng);
    total += x;
  }
  for (auto& x : p) x /= total;
  c.platform_p = p;

  out.pressure = std::exp(uniform(rng, std::log(cfg.pressure_lo), std::log(cfg.pressure_hi)));
  out.peak_shift = static_cast<int>(std::floor(uniform01(rng) * (2 * cfg.peak_jitter + 1))) - cfg.peak_jitter;
  return out;
}

double raw_clicks(const SynthConfig& cfg, int bin, double peak) {
  const double z = (bin - peak) / cfg.peak_width;
  const double r = bin / cfg.reserve_width;
  return cfg.peak_clicks * (std::exp(-0.5 * z * z) + cfg.reserve_bump * std::exp(-0.5 * r * r));
}

double price_factor(const SynthConfig& cfg) { return cfg.auction_type == AuctionType::kVcg ? 0.6 : 1.0; }

void emit_stats(const SynthConfig& cfg, const Drawn& drawn, const std::vector<TrafficProfile>& traffic,
                std::mt19937_64& rng, DatasetBuilder& b) {
  const Campaign& c = drawn.campaign;
  const TrafficProfile& prof = traffic[static_cast<std::size_t>(std::stoi(c.region_id.substr(1)) - 1)];
  const CategoryProfile& cat = cfg.categories[drawn.category];
  const double base_peak = cfg.peak_bin + drawn.peak_shift;

  // Volume so that bidding the whole range for the whole life would cost
  // `pressure` times the budget, before noise.
  double unit_cost = 0.0;
  for (int bin = 0; bin <= cfg.max_bin; ++bin) {
    unit_cost += raw_clicks(cfg, bin, base_peak) * cfg.contacts_per_click * bid_of(bin, cfg.gamma);
  }
  unit_cost *= price_factor(cfg);
  const double traffic_mass = window_share(prof, c.campaign_start, c.campaign_end) * kSlotsPerWeek;
  const double budget = static_cast<double>(c.auction_budget.minor()) / cfg.money_scale;
  const double volume = drawn.pressure * budget / (unit_cost * std::max(traffic_mass, 1e-9));
  const double threshold = 1e-3 * cfg.peak_clicks;

  for (Timestamp t = c.campaign_start; t < c.campaign_end; t += kHour) {
    const int slot = slot_of(t);
    const double traffic_factor = prof.slot(slot) * kSlotsPerWeek;
    const double peak = base_peak + cfg.night_bin_drift * (1.0 - daily_level(cfg, slot % 24));
    for (int bin = 0; bin <= cfg.max_bin; ++bin) {
      const double shape = raw_clicks(cfg, bin, peak);
      if (shape < threshold) continue;
      const double noise = std::exp(cfg.noise_sigma * standard_normal(rng) - 0.5 * cfg.noise_sigma * cfg.noise_sigma);
      AuctionStatRecord r;
      r.campaign_id = c.campaign_id;
      r.item_id = c.item_id;
      r.period = t;
      r.contact_price_bin = bin;
      r.clicks_surplus = volume * shape * traffic_factor * noise;
      r.contacts_surplus = r.clicks_surplus * cfg.contacts_per_click * uniform(rng, 0.9, 1.1);
      r.visibility_surplus = r.clicks_surplus * cfg.visibility_per_click * uniform(rng, 0.9, 1.1);
      const double bid = bid_of(bin, cfg.gamma);
      if (cfg.auction_type == AuctionType::kVcg) {
        r.win_bid_surplus = r.contacts_surplus * bid * uniform(rng, 0.3, 0.9);
        r.auction_count = std::round(r.visibility_surplus * uniform(rng, 1.0, 3.0) * 10.0);
      } else {
        r.win_bid_surplus = r.contacts_surplus * bid;
      }
      const double lift = 0.7 + 0.6 * static_cast<double>(bin) / cfg.max_bin;
      r.ctr_predicts = std::clamp(cat.ctr * lift * uniform(rng, 0.9, 1.1), 0.0, 1.0);
      r.cr_predicts = std::clamp(cat.cvr * lift * uniform(rng, 0.9, 1.1), 0.0, 1.0);
      b.add_stat(r);
    }
  }
}

}  // namespace

SynthConfig SynthConfig::defaults(AuctionType type) {
  SynthConfig cfg;
  cfg.auction_type = type;
  const bool vcg = type == AuctionType::kVcg;
  if (vcg) {
    cfg.duration_weights = {0.7585, 0.0845, 0.1557, 0.0013};
    cfg.budget_weights = {0.7353, 0.0735, 0.1428, 0.0484};
    cfg.peak_bin = 55.0;
    cfg.peak_clicks = 0.5;
  } else {
    cfg.duration_weights = {0.8346, 0.0741, 0.0827, 0.0086};
    cfg.budget_weights = {0.0, 0.0, 0.8296, 0.1704};
    cfg.peak_bin = 40.0;
    cfg.peak_clicks = 2.0;
  }
  // The mix shares are rounded to four places; rescale so they sum to 1.
  for (auto* w : {&cfg.duration_weights, &cfg.budget_weights}) {
    const double s = std::accumulate(w->begin(), w->end(), 0.0);
    for (auto& x : *w) x /= s;
  }
  for (const auto& row : kCategories) {
    cfg.categories.push_back({row.label, vcg ? row.vcg_ctr : row.fp_ctr, vcg ? row.vcg_cvr : row.fp_cvr});
  }
  return cfg;
}

void SynthConfig::validate() const {
  for (const auto* w : {&duration_weights, &budget_weights}) {
    double s = 0.0;
    for (double x : *w) {
      if (!(x >= 0.0)) throw std::invalid_argument("synth weights must be non-negative");
      s += x;
    }
    if (std::fabs(s - 1.0) > 1e-6) throw std::invalid_argument("synth weights must sum to 1");
  }
  if (categories.empty()) throw std::invalid_argument("synth config needs at least one category");
  if (n_regions < 1) throw std::invalid_argument("synth config needs at least one region");
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
  if (!(money_scale > 0.0) || !(bid_unit > 0.0)) throw std::invalid_argument("money units must be positive");
  if (!(min_budget > 0.0 && min_budget < kBudgetBandEdges[1])) throw std::invalid_argument("bad min_budget");
  if (max_bin < 1 || !(peak_width > 0.0) || !(reserve_width > 0.0) || !(peak_clicks > 0.0)) {
    throw std::invalid_argument("bad surplus curve parameters");
  }
  if (!(noise_sigma >= 0.0) || !(pressure_lo > 0.0) || !(pressure_lo <= pressure_hi)) {
    throw std::invalid_argument("bad noise or pressure parameters");
  }
  if (!(traffic_ratio_lo > 1.0) || !(traffic_ratio_lo <= traffic_ratio_hi)) {
    throw std::invalid_argument("bad traffic ratio range");
  }
  if (!(weekly_amplitude >= 0.0 && weekly_amplitude < 1.0)) throw std::invalid_argument("bad weekly amplitude");
  if (peak_hour == trough_hour || weekly_max_dow == weekly_min_dow) {
    throw std::invalid_argument("traffic peak and trough must differ");
  }
  if (horizon_days < 1) throw std::invalid_argument("horizon must be at least one day");
}

std::vector<TrafficProfile> generate_traffic(const SynthConfig& cfg) {
  std::mt19937_64 rng(derive_seed(cfg.seed, kTrafficStream));
  std::vector<TrafficProfile> out;
  const double wa = cfg.weekly_amplitude;
  for (int r = 0; r < cfg.n_regions; ++r) {
    const double ratio = uniform(rng, cfg.traffic_ratio_lo, cfg.traffic_ratio_hi);
    // max / min = (1 + wa) / (lo * (1 - wa)) with the daily level in [lo, 1].
    const double lo = (1.0 + wa) / (ratio * (1.0 - wa));
    std::array<double, kSlotsPerWeek> shares{};
    double total = 0.0;
    for (int dow = 1; dow <= 7; ++dow) {
      const double weekly = 1.0 + wa * asymmetric_wave(dow - 1, cfg.weekly_min_dow - 1, cfg.weekly_max_dow - 1, 7);
      for (int h = 0; h < 24; ++h) {
        const double v = (lo + (1.0 - lo) * daily_level(cfg, h)) * weekly;
        shares[static_cast<std::size_t>(slot_index(dow, h))] = v;
        total += v;
      }
    }
    for (auto& s : shares) s /= total;
    out.emplace_back("r" + std::to_string(r + 1), shares);
  }
  return out;
}

std::vector<Campaign> generate_campaigns(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<Campaign> out;
  out.reserve(cfg.n_campaigns);
  for (std::size_t i = 0; i < cfg.n_campaigns; ++i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, i));
    out.push_back(draw_campaign(cfg, i, rng).campaign);
  }
  return out;
}

Dataset generate_range(const SynthConfig& cfg, std::size_t first, std::size_t count) {
  cfg.validate();
  const std::vector<TrafficProfile> traffic = generate_traffic(cfg);
  DatasetBuilder b(cfg.auction_type, cfg.gamma);
  for (const auto& p : traffic) b.add_profile(p);
  const std::size_t last = std::min(cfg.n_campaigns, first + count);
  for (std::size_t i = first; i < last; ++i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, i));
    Drawn drawn = draw_campaign(cfg, i, rng);
    emit_stats(cfg, drawn, traffic, rng, b);
    b.add_campaign(std::move(drawn.campaign));
  }
  return b.build();
}

Dataset generate(const SynthConfig& cfg) { return generate_range(cfg, 0, cfg.n_campaigns); }

int duration_class(Timestamp duration) {
  const auto days = static_cast<int>((duration + kDay - 1) / kDay);
  for (int k = 0; k < 4; ++k) {
    if (days <= kDurationClassDays[static_cast<std::size_t>(k + 1)]) return k;
  }
  return 4;
}

int budget_band(double currency) {
  if (currency < 0.0) return 4;
  for (int k = 0; k < 4; ++k) {
    // The top band includes its upper edge.
    const double hi = kBudgetBandEdges[static_cast<std::size_t>(k + 1)];
    if (currency < hi || (k == 3 && currency == hi)) return k;
  }
  return 4;
}

nlohmann::json describe(const Dataset& d, double minor_per_currency) {
  static const char* kDurationLabels[] = {"1", "2-6", "7", "8-14", "other"};
  static const char* kBudgetLabels[] = {"0-500", "500-1000", "1000-10000", "10000-50000", "other"};
  std::array<std::size_t, 5> durations{};
  std::array<std::size_t, 5> budgets{};
  for (const auto& c : d.campaigns()) {
    ++durations[static_cast<std::size_t>(duration_class(c.duration()))];
    ++budgets[static_cast<std::size_t>(budget_band(static_cast<double>(c.auction_budget.minor()) / minor_per_currency))];
  }
  const double n = static_cast<double>(d.campaigns().size());
  nlohmann::json j;
  j["campaigns"] = d.campaigns().size();
  j["records"] = d.record_count();
  j["auction_type"] = std::string(to_string(d.auction_type()));
  for (std::size_t k = 0; k < 5; ++k) {
    j["duration_days"][kDurationLabels[k]] = {{"count", durations[k]},
                                              {"share", n > 0 ? static_cast<double>(durations[k]) / n : 0.0}};
    j["budget_bands"][kBudgetLabels[k]] = {{"count", budgets[k]},
                                           {"share", n > 0 ? static_cast<double>(budgets[k]) / n : 0.0}};
  }

  auto regions = nlohmann::json::array();
  for (const auto& [id, p] : d.traffic()) {
    const auto& s = p.shares();
    const auto mx = std::max_element(s.begin(), s.end());
    const auto mn = std::min_element(s.begin(), s.end());
    regions.push_back({{"region_id", id},
                       {"week_mass", p.week_mass()},
                       {"max_slot", mx - s.begin()},
                       {"min_slot", mn - s.begin()},
                       {"max_min_ratio", *mn > 0.0 ? *mx / *mn : 0.0}});
  }
  j["traffic"] = std::move(regions);

  std::map<std::int32_t, std::array<double, 3>> by_bin;
  for (const auto& [id, stats] : d.stats()) {
    for (const auto& [period, slice] : stats) {
      for (std::size_t i = 0; i < slice.size(); ++i) {
        auto& acc = by_bin[slice.bins[i]];
        acc[0] += slice.clicks[i];
        acc[1] += slice.win_bid[i];
        acc[2] += 1.0;
      }
    }
  }
  auto bins = nlohmann::json::array();
  for (const auto& [bin, acc] : by_bin) {
    bins.push_back({{"bin", bin}, {"clicks", acc[0]}, {"win_bid", acc[1]}, {"rows", acc[2]}});
  }
  j["surplus_by_bin"] = std::move(bins);
  return j;
}

}  // namespace rtbbench
