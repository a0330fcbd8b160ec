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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "rtbbench/common.hpp"
#include "rtbbench/traffic.hpp"

namespace rtbbench {

struct Campaign {
  std::string loc_id;
  std::string campaign_id;
  std::string item_id;
  Timestamp campaign_start = 0;
  Timestamp campaign_end = 0;
  std::string campaign_start_date;  // YYYY-MM-DD
  std::string campaign_end_date;
  Money auction_budget;
  std::string microcat_ext;
  std::string logical_category;  // "major.minor", compared as a label
  std::string region_id;
  std::optional<std::array<double, 4>> platform_p;

  Timestamp duration() const { return campaign_end - campaign_start; }
};

// One row of the auction statistics table.
struct AuctionStatRecord {
  std::string campaign_id;
  std::string item_id;
  Timestamp period = 0;
  std::int32_t contact_price_bin = 0;
  double visibility_surplus = 0.0;
  double clicks_surplus = 0.0;
  double contacts_surplus = 0.0;
  double win_bid_surplus = 0.0;
  double ctr_predicts = 0.0;
  double cr_predicts = 0.0;
  std::optional<double> auction_count;
};

// All records of one (campaign, period), column-major and sorted by bin.
struct StatSlice {
  std::string item_id;
  std::vector<std::int32_t> bins;
  std::vector<double> visibility;
  std::vector<double> clicks;
  std::vector<double> contacts;
  std::vector<double> win_bid;
  std::vector<double> ctr;
  std::vector<double> cr;
  std::vector<double> auction_count;  // NaN where the field is absent

  std::size_t size() const { return bins.size(); }
  bool empty() const { return bins.empty(); }
  void push_back(const AuctionStatRecord& r);
  AuctionStatRecord record(const std::string& campaign_id, Timestamp period, std::size_t i) const;
  void sort_by_bin();
};

using CampaignStats = std::map<Timestamp, StatSlice>;

struct CtrCvr {
  double ctr = 0.0;
  double cvr = 0.0;
};

class DatasetBuilder;

// Immutable once built. Campaigns are kept sorted by campaign_id, so the
// dataset does not depend on input row order.
class Dataset {
 public:
  Dataset() = default;

  AuctionType auction_type() const { return auction_type_; }
  double gamma() const { return gamma_; }
  Timestamp epoch_offset() const { return epoch_offset_; }

  const std::vector<Campaign>& campaigns() const { return campaigns_; }
  const Campaign* find_campaign(const std::string& id) const;
  const std::map<std::string, CampaignStats>& stats() const { return stats_; }
  const CampaignStats* campaign_stats(const std::string& id) const;
  // Slice whose period falls in [now, now + step), if any.
  const StatSlice* slice_at(const std::string& campaign_id, Timestamp now, Timestamp step = kHour) const;
  const std::map<std::string, TrafficProfile>& traffic() const { return traffic_; }
  const TrafficProfile* profile(const std::string& region_id) const;
  std::size_t record_count() const;

  // Grouped mean of CTRPredicts / CRPredicts with the fallback chain
  // group -> category -> global -> (0, 0).
  CtrCvr estimate_ctr_cvr(const std::string& category, int hour_of_week, std::int32_t bin_lo,
                          std::int32_t bin_hi) const;

  // Subset with the given campaigns and their stats; traffic is shared.
  Dataset restrict_to(const std::vector<std::string>& campaign_ids) const;

 private:
  friend class DatasetBuilder;

  struct BinAgg {
    std::int32_t bin;
    double cum_ctr;
    double cum_cr;
    double cum_n;
  };
  struct Sums {
    double ctr = 0.0;
    double cr = 0.0;
    double n = 0.0;
  };
  void build_indexes();

  AuctionType auction_type_ = AuctionType::kVcg;
  double gamma_ = kDefaultGamma;
  Timestamp epoch_offset_ = 0;
  std::vector<Campaign> campaigns_;
  std::unordered_map<std::string, std::size_t> campaign_index_;
  std::map<std::string, CampaignStats> stats_;
  std::map<std::string, TrafficProfile> traffic_;
  // (category, hour_of_week) -> cumulative aggregates by bin
  std::map<std::pair<std::string, int>, std::vector<BinAgg>> ctr_groups_;
  std::map<std::string, Sums> ctr_category_;
  Sums ctr_global_;
};

class DatasetBuilder {
 public:
  explicit DatasetBuilder(AuctionType type, double gamma = kDefaultGamma, Timestamp epoch_offset = 0);

  // Duplicate campaign ids and duplicate (campaign, period, bin) keys are
  // rejected with std::invalid_argument.
  void add_campaign(Campaign c);
  void add_stat(const AuctionStatRecord& r);
  // Missing slots stay 0 and are reported by validation.
  void add_traffic(const std::string& region_id, int dow, int hour, double share);
  void add_profile(const TrafficProfile& p);

  Dataset build();

 private:
  Dataset d_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::map<std::string, std::array<double, kSlotsPerWeek>> pending_traffic_;
  std::map<std::string, std::array<bool, kSlotsPerWeek>> seen_traffic_;
};

struct DatasetPaths {
  std::filesystem::path campaigns;
  std::filesystem::path stats;
  std::filesystem::path traffic;

  // <dir>/campaigns.csv, <dir>/auction_stats.csv, <dir>/traffic.csv
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Throws DataError with file:line context on missing columns, unparseable
// values and duplicate keys; std::runtime_error when a file cannot be opened.
Dataset load_dataset(const DatasetPaths& paths, AuctionType type, double gamma = kDefaultGamma,
                     Timestamp epoch_offset = 0);

void write_dataset(const Dataset& d, const DatasetPaths& paths);

// Exact match, or prefix on whole dot-separated components ("1" matches
// "1" and "1.13", not "13.2").
bool category_matches(const std::string& label, const std::string& prefix);

std::string format_date(Timestamp t);

struct ValidationCheck {
  ValidationCheck() = default;
  explicit ValidationCheck(std::string n) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  std::vector<std::string> offending;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

ValidationReport validate_dataset(const Dataset& d);

}  // namespace rtbbench
