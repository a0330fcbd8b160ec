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

#include "rtbbench/data_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rtbbench/csv.hpp"

namespace rtbbench {

std::string_view to_string(AuctionType t) { return t == AuctionType::kVcg ? "vcg" : "fp"; }

AuctionType parse_auction_type(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "vcg") return AuctionType::kVcg;
  if (lower == "fp" || lower == "fpa") return AuctionType::kFp;
  throw std::invalid_argument("unknown auction type '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// StatSlice

void StatSlice::push_back(const AuctionStatRecord& r) {
  bins.push_back(r.contact_price_bin);
  visibility.push_back(r.visibility_surplus);
  clicks.push_back(r.clicks_surplus);
  contacts.push_back(r.contacts_surplus);
  win_bid.push_back(r.win_bid_surplus);
  ctr.push_back(r.ctr_predicts);
  cr.push_back(r.cr_predicts);
  auction_count.push_back(r.auction_count ? *r.auction_count : std::numeric_limits<double>::quiet_NaN());
}

AuctionStatRecord StatSlice::record(const std::string& campaign_id, Timestamp period, std::size_t i) const {
  AuctionStatRecord r;
  r.campaign_id = campaign_id;
  r.item_id = item_id;
  r.period = period;
  r.contact_price_bin = bins[i];
  r.visibility_surplus = visibility[i];
  r.clicks_surplus = clicks[i];
  r.contacts_surplus = contacts[i];
  r.win_bid_surplus = win_bid[i];
  r.ctr_predicts = ctr[i];
  r.cr_predicts = cr[i];
  if (!std::isnan(auction_count[i])) r.auction_count = auction_count[i];
  return r;
}

void StatSlice::sort_by_bin() {
  if (std::is_sorted(bins.begin(), bins.end())) return;
  std::vector<std::size_t> order(bins.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return bins[a] < bins[b]; });
  auto permute = [&order](auto& v) {
    auto copy = v;
    for (std::size_t i = 0; i < order.size(); ++i) v[i] = copy[order[i]];
  };
  permute(bins);
  permute(visibility);
  permute(clicks);
  permute(contacts);
  permute(win_bid);
  permute(ctr);
  permute(cr);
  permute(auction_count);
}

// ---------------------------------------------------------------------------
// Dataset

const Campaign* Dataset::find_campaign(const std::string& id) const {
  auto it = campaign_index_.find(id);
  return it == campaign_index_.end() ? nullptr : &campaigns_[it->second];
}

const CampaignStats* Dataset::campaign_stats(const std::string& id) const {
  auto it = stats_.find(id);
  return it == stats_.end() ? nullptr : &it->second;
}

const StatSlice* Dataset::slice_at(const std::string& campaign_id, Timestamp now, Timestamp step) const {
  const CampaignStats* cs = campaign_stats(campaign_id);
  if (!cs) return nullptr;
  auto it = cs->lower_bound(now);
  if (it == cs->end() || it->first >= now + step) return nullptr;
  return &it->second;
}

const TrafficProfile* Dataset::profile(const std::string& region_id) const {
  auto it = traffic_.find(region_id);
  return it == traffic_.end() ? nullptr : &it->second;
}

std::size_t Dataset::record_count() const {
  std::size_t n = 0;
  for (const auto& [id, cs] : stats_) {
    for (const auto& [period, slice] : cs) n += slice.size();
  }
  return n;
}

void Dataset::build_indexes() {
  std::sort(campaigns_.begin(), campaigns_.end(),
            [](const Campaign& a, const Campaign& b) { return a.campaign_id < b.campaign_id; });
  campaign_index_.clear();
  for (std::size_t i = 0; i < campaigns_.size(); ++i) campaign_index_.emplace(campaigns_[i].campaign_id, i);

  // Per (category, hour, bin) sums first, then cumulative by bin.
  std::map<std::pair<std::string, int>, std::map<std::int32_t, Sums>> raw;
  ctr_groups_.clear();
  ctr_category_.clear();
  ctr_global_ = {};
  for (const auto& [id, cs] : stats_) {
    const Campaign* c = find_campaign(id);
    if (!c) continue;
    auto& cat = ctr_category_[c->logical_category];
    for (const auto& [period, slice] : cs) {
      auto& group = raw[{c->logical_category, slot_of(period, epoch_offset_)}];
      for (std::size_t i = 0; i < slice.size(); ++i) {
        auto& s = group[slice.bins[i]];
        s.ctr += slice.ctr[i];
        s.cr += slice.cr[i];
        s.n += 1.0;
        cat.ctr += slice.ctr[i];
        cat.cr += slice.cr[i];
        cat.n += 1.0;
        ctr_global_.ctr += slice.ctr[i];
        ctr_global_.cr += slice.cr[i];
        ctr_global_.n += 1.0;
      }
    }
  }
  for (auto& [key, by_bin] : raw) {
    auto& out = ctr_groups_[key];
    out.reserve(by_bin.size());
    Sums acc;
    for (const auto& [bin, s] : by_bin) {
      acc.ctr += s.ctr;
      acc.cr += s.cr;
      acc.n += s.n;
      out.push_back({bin, acc.ctr, acc.cr, acc.n});
    }
  }
}

CtrCvr Dataset::estimate_ctr_cvr(const std::string& category, int hour_of_week, std::int32_t bin_lo,
                                 std::int32_t bin_hi) const {
  auto mean = [](double ctr, double cr, double n) {
    return CtrCvr{std::clamp(ctr / n, 0.0, 1.0), std::clamp(cr / n, 0.0, 1.0)};
  };
  if (bin_lo <= bin_hi) {
    auto it = ctr_groups_.find({category, hour_of_week});
    if (it != ctr_groups_.end()) {
      const auto& v = it->second;
      auto lo = std::lower_bound(v.begin(), v.end(), bin_lo,
                                 [](const BinAgg& a, std::int32_t b) { return a.bin < b; });
      auto hi = std::upper_bound(v.begin(), v.end(), bin_hi,
                                 [](std::int32_t b, const BinAgg& a) { return b < a.bin; });
      if (lo < hi) {
        const BinAgg& last = *(hi - 1);
        double ctr = last.cum_ctr, cr = last.cum_cr, n = last.cum_n;
        if (lo != v.begin()) {
          const BinAgg& before = *(lo - 1);
          ctr -= before.cum_ctr;
          cr -= before.cum_cr;
          n -= before.cum_n;
        }
        if (n > 0.5) return mean(ctr, cr, n);
      }
    }
  }
  auto cat = ctr_category_.find(category);
  if (cat != ctr_category_.end() && cat->second.n > 0.0) {
    return mean(cat->second.ctr, cat->second.cr, cat->second.n);
  }
  if (ctr_global_.n > 0.0) return mean(ctr_global_.ctr, ctr_global_.cr, ctr_global_.n);
  return {};
}

Dataset Dataset::restrict_to(const std::vector<std::string>& campaign_ids) const {
  DatasetBuilder b(auction_type_, gamma_, epoch_offset_);
  for (const auto& id : campaign_ids) {
    const Campaign* c = find_campaign(id);
    if (!c) throw std::invalid_argument("unknown campaign '" + id + "'");
    b.add_campaign(*c);
  }
  Dataset out = b.build();
  for (const auto& id : campaign_ids) {
    auto it = stats_.find(id);
    if (it != stats_.end()) out.stats_.emplace(id, it->second);
  }
  out.traffic_ = traffic_;
  out.build_indexes();
  return out;
}

// ---------------------------------------------------------------------------
// DatasetBuilder

DatasetBuilder::DatasetBuilder(AuctionType type, double gamma, Timestamp epoch_offset) {
  if (!(gamma > 1.0)) throw std::invalid_argument("gamma must be > 1");
  d_.auction_type_ = type;
  d_.gamma_ = gamma;
  d_.epoch_offset_ = epoch_offset;
}

void DatasetBuilder::add_campaign(Campaign c) {
  if (!ids_.emplace(c.campaign_id, d_.campaigns_.size()).second) {
    throw std::invalid_argument("duplicate campaign_id " + c.campaign_id);
  }
  d_.campaigns_.push_back(std::move(c));
}

void DatasetBuilder::add_stat(const AuctionStatRecord& r) {
  StatSlice& slice = d_.stats_[r.campaign_id][r.period];
  if (slice.empty()) {
    slice.item_id = r.item_id;
  } else if (slice.item_id != r.item_id) {
    throw std::invalid_argument("item_id " + r.item_id + " differs from " + slice.item_id +
                                " within campaign " + r.campaign_id + " period " + std::to_string(r.period));
  }
  // Slices are small (tens of bins); a linear scan is cheaper than a set.
  if (std::find(slice.bins.begin(), slice.bins.end(), r.contact_price_bin) != slice.bins.end()) {
    throw std::invalid_argument("duplicate key (campaign " + r.campaign_id + ", period " +
                                std::to_string(r.period) + ", bin " + std::to_string(r.contact_price_bin) + ")");
  }
  slice.push_back(r);
}

void DatasetBuilder::add_traffic(const std::string& region_id, int dow, int hour, double share) {
  if (dow < 1 || dow > 7 || hour < 0 || hour > 23) {
    throw std::invalid_argument("traffic slot out of range: dow " + std::to_string(dow) + ", hour " +
                                std::to_string(hour));
  }
  auto& seen = seen_traffic_[region_id];
  auto& shares = pending_traffic_[region_id];
  const int idx = slot_index(dow, hour);
  if (seen[idx]) {
    throw std::invalid_argument("duplicate traffic slot (region " + region_id + ", dow " + std::to_string(dow) +
                                ", hour " + std::to_string(hour) + ")");
  }
  seen[idx] = true;
  shares[idx] = share;
}

void DatasetBuilder::add_profile(const TrafficProfile& p) {
  seen_traffic_[p.region_id()].fill(true);
  pending_traffic_[p.region_id()] = p.shares();
}

Dataset DatasetBuilder::build() {
  for (auto& [region, shares] : pending_traffic_) {
    d_.traffic_.insert_or_assign(region, TrafficProfile(region, shares));
  }
  for (auto& [id, cs] : d_.stats_) {
    for (auto& [period, slice] : cs) slice.sort_by_bin();
  }
  d_.build_indexes();
  Dataset out = std::move(d_);
  d_ = Dataset();
  ids_.clear();
  pending_traffic_.clear();
  seen_traffic_.clear();
  return out;
}

// ---------------------------------------------------------------------------
// CSV I/O

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "campaigns.csv", dir / "auction_stats.csv", dir / "traffic.csv"};
}

namespace {

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

std::optional<std::array<double, 4>> parse_platform_p(const csv::Reader& r, std::string_view s) {
  std::string body(s);
  if (body.empty() || body == "--" || body == "nan") return std::nullopt;
  for (char& ch : body) {
    if (ch == '[' || ch == ']' || ch == ';') ch = ' ';
  }
  std::istringstream is(body);
  std::array<double, 4> out{};
  std::string tok;
  std::size_t n = 0;
  while (is >> tok) {
    if (n == 4) r.fail("platform_p has more than 4 components");
    char* end = nullptr;
    out[n] = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) r.fail("cannot parse platform_p component '" + tok + "'");
    ++n;
  }
  if (n != 4) r.fail("platform_p must have 4 components");
  return out;
}

bool is_absent(std::string_view s) { return s.empty() || s == "--" || s == "nan" || s == "NaN" || s == "NA"; }

Money parse_budget(const csv::Reader& r, std::size_t col) { return Money(r.as_integral(col)); }

}  // namespace

Dataset load_dataset(const DatasetPaths& paths, AuctionType type, double gamma, Timestamp epoch_offset) {
  DatasetBuilder b(type, gamma, epoch_offset);

  {
    auto in = open_input(paths.campaigns);
    csv::Reader r(in, paths.campaigns.string());
    r.read_header();
    const auto loc = r.column("loc_id"), cid = r.column("campaign_id"), item = r.column("item_id"),
               sd = r.column("campaign_start_date"), ed = r.column("campaign_end_date"),
               st = r.column("campaign_start"), en = r.column("campaign_end"), bud = r.column("auction_budget"),
               mc = r.column("microcat_ext"), cat = r.column("logical_category"), reg = r.column("region_id");
    const auto pp = r.find_column("platform_p");
    while (r.next()) {
      Campaign c;
      c.loc_id = r.field(loc);
      c.campaign_id = r.field(cid);
      c.item_id = r.field(item);
      c.campaign_start_date = r.field(sd);
      c.campaign_end_date = r.field(ed);
      c.campaign_start = r.as_integral(st);
      c.campaign_end = r.as_integral(en);
      c.auction_budget = parse_budget(r, bud);
      c.microcat_ext = r.field(mc);
      c.logical_category = r.field(cat);
      c.region_id = r.field(reg);
      if (c.campaign_id.empty()) r.fail("empty campaign_id");
      if (pp) c.platform_p = parse_platform_p(r, r.field(*pp));
      try {
        b.add_campaign(std::move(c));
      } catch (const std::invalid_argument& e) {
        r.fail(e.what());
      }
    }
  }

  {
    auto in = open_input(paths.stats);
    csv::Reader r(in, paths.stats.string());
    r.read_header();
    const auto item = r.column("item_id"), cid = r.column("campaign_id"), per = r.column("period"),
               bin = r.column("contact_price_bin"), vis = r.column("AuctionVisibilitySurplus"),
               clk = r.column("AuctionClicksSurplus"), con = r.column("AuctionContactsSurplus"),
               win = r.column("AuctionWinBidSurplus"), ctr = r.column("CTRPredicts"), cr = r.column("CRPredicts");
    const auto cnt = r.find_column("AuctionCount");
    while (r.next()) {
      AuctionStatRecord s;
      s.item_id = r.field(item);
      s.campaign_id = r.field(cid);
      s.period = r.as_integral(per);
      const auto raw_bin = r.as_integral(bin);
      if (raw_bin < std::numeric_limits<std::int32_t>::min() || raw_bin > std::numeric_limits<std::int32_t>::max()) {
        r.fail("contact_price_bin out of range");
      }
      s.contact_price_bin = static_cast<std::int32_t>(raw_bin);
      s.visibility_surplus = r.as_double(vis);
      s.clicks_surplus = r.as_double(clk);
      s.contacts_surplus = r.as_double(con);
      s.win_bid_surplus = r.as_double(win);
      s.ctr_predicts = r.as_double(ctr);
      s.cr_predicts = r.as_double(cr);
      if (cnt && !is_absent(r.field(*cnt))) s.auction_count = r.as_double(*cnt);
      try {
        b.add_stat(s);
      } catch (const std::invalid_argument& e) {
        r.fail(e.what());
      }
    }
  }

  {
    auto in = open_input(paths.traffic);
    csv::Reader r(in, paths.traffic.string());
    r.read_header();
    const auto reg = r.column("region_id"), dow = r.column("dow"), hour = r.column("hour");
    auto share_col = r.find_column("traffic_share");
    if (!share_col) share_col = r.find_column("traffic share");
    if (!share_col) share_col = r.column("traffic_share");
    while (r.next()) {
      try {
        b.add_traffic(std::string(r.field(reg)), static_cast<int>(r.as_integral(dow)),
                      static_cast<int>(r.as_integral(hour)), r.as_double(*share_col));
      } catch (const std::invalid_argument& e) {
        r.fail(e.what());
      }
    }
  }

  return b.build();
}

void write_dataset(const Dataset& d, const DatasetPaths& paths) {
  using csv::format_double;
  {
    std::ofstream out(paths.campaigns);
    if (!out) throw std::runtime_error("cannot write " + paths.campaigns.string());
    csv::write_row(out, {"loc_id", "campaign_id", "item_id", "campaign_start_date", "campaign_end_date",
                         "campaign_start", "campaign_end", "auction_budget", "microcat_ext", "logical_category",
                         "region_id", "platform_p"});
    for (const auto& c : d.campaigns()) {
      std::string pp;
      if (c.platform_p) {
        pp = "[";
        for (std::size_t i = 0; i < 4; ++i) {
          if (i) pp += ' ';
          pp += format_double((*c.platform_p)[i]);
        }
        pp += "]";
      }
      csv::write_row(out, {c.loc_id, c.campaign_id, c.item_id, c.campaign_start_date, c.campaign_end_date,
                           std::to_string(c.campaign_start), std::to_string(c.campaign_end),
                           std::to_string(c.auction_budget.minor()), c.microcat_ext, c.logical_category,
                           c.region_id, pp});
    }
  }
  {
    std::ofstream out(paths.stats);
    if (!out) throw std::runtime_error("cannot write " + paths.stats.string());
    csv::write_row(out, {"item_id", "campaign_id", "period", "contact_price_bin", "AuctionVisibilitySurplus",
                         "AuctionClicksSurplus", "AuctionContactsSurplus", "AuctionWinBidSurplus", "CTRPredicts",
                         "CRPredicts", "AuctionCount"});
    for (const auto& [id, cs] : d.stats()) {
      for (const auto& [period, s] : cs) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          csv::write_row(out, {s.item_id, id, std::to_string(period), std::to_string(s.bins[i]),
                               format_double(s.visibility[i]), format_double(s.clicks[i]),
                               format_double(s.contacts[i]), format_double(s.win_bid[i]), format_double(s.ctr[i]),
                               format_double(s.cr[i]),
                               std::isnan(s.auction_count[i]) ? std::string() : format_double(s.auction_count[i])});
        }
      }
    }
  }
  {
    std::ofstream out(paths.traffic);
    if (!out) throw std::runtime_error("cannot write " + paths.traffic.string());
    csv::write_row(out, {"region_id", "dow", "hour", "traffic_share"});
    for (const auto& [region, p] : d.traffic()) {
      for (int dow = 1; dow <= 7; ++dow) {
        for (int hour = 0; hour < 24; ++hour) {
          csv::write_row(out, {region, std::to_string(dow), std::to_string(hour),
                               format_double(p.slot(slot_index(dow, hour)))});
        }
      }
    }
  }
}

bool category_matches(const std::string& label, const std::string& prefix) {
  if (prefix.empty() || label == prefix) return true;
  return label.size() > prefix.size() && label.compare(0, prefix.size(), prefix) == 0 && label[prefix.size()] == '.';
}

std::string format_date(Timestamp t) {
  using namespace std::chrono;
  const sys_days day{days{t >= 0 ? t / kDay : -((-t + kDay - 1) / kDay)}};
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok();
  auto arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"offending", c.offending}});
  }
  j["checks"] = std::move(arr);
  return j;
}

namespace {

std::string stat_key(const std::string& id, Timestamp period, std::int32_t bin) {
  return id + "/" + std::to_string(period) + "/" + std::to_string(bin);
}

void flag(ValidationCheck& c, std::string key) {
  c.passed = false;
  c.offending.push_back(std::move(key));
}

}  // namespace

ValidationReport validate_dataset(const Dataset& d) {
  ValidationCheck window{"campaign_window"}, budget{"budget_positive"}, platform{"platform_p"},
      known{"stats_known_campaign"}, within{"stats_within_window"}, surplus{"surplus_nonnegative"},
      predicts{"predictions_in_unit_interval"}, normalized{"traffic_normalized"}, present{"traffic_present"},
      coverage{"full_period_coverage"};

  for (const auto& c : d.campaigns()) {
    if (c.campaign_end <= c.campaign_start) flag(window, c.campaign_id);
    if (c.auction_budget.minor() <= 0) flag(budget, c.campaign_id);
    if (c.platform_p) {
      const auto& p = *c.platform_p;
      const bool nonneg = std::all_of(p.begin(), p.end(), [](double x) { return x >= 0.0; });
      if (!nonneg || std::fabs(p[0] + p[1] + p[2] + p[3] - 1.0) > 1e-6) flag(platform, c.campaign_id);
    }
    if (!d.profile(c.region_id)) flag(present, c.campaign_id + "@" + c.region_id);

    bool covered = c.campaign_end > c.campaign_start;
    for (Timestamp t = c.campaign_start; covered && t < c.campaign_end; t += kHour) {
      if (!d.slice_at(c.campaign_id, t)) covered = false;
    }
    if (!covered) flag(coverage, c.campaign_id);
  }

  for (const auto& [id, cs] : d.stats()) {
    const Campaign* c = d.find_campaign(id);
    if (!c) flag(known, id);
    for (const auto& [period, s] : cs) {
      const bool in_window = c && period >= c->campaign_start && period < c->campaign_end;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (c && !in_window) flag(within, stat_key(id, period, s.bins[i]));
        const bool neg = s.visibility[i] < 0.0 || s.clicks[i] < 0.0 || s.contacts[i] < 0.0 || s.win_bid[i] < 0.0 ||
                         (!std::isnan(s.auction_count[i]) && s.auction_count[i] < 0.0);
        if (neg) flag(surplus, stat_key(id, period, s.bins[i]));
        if (s.ctr[i] < 0.0 || s.ctr[i] > 1.0 || s.cr[i] < 0.0 || s.cr[i] > 1.0) {
          flag(predicts, stat_key(id, period, s.bins[i]));
        }
      }
    }
  }

  for (const auto& [region, p] : d.traffic()) {
    const auto& sh = p.shares();
    const bool nonneg = std::all_of(sh.begin(), sh.end(), [](double x) { return x >= 0.0; });
    if (!nonneg || std::fabs(p.week_mass() - 1.0) > 1e-6) flag(normalized, region);
  }

  ValidationReport report;
  report.checks = {window, budget, platform, known, within, surplus, predicts, normalized, present, coverage};
  return report;
}

}  // namespace rtbbench
