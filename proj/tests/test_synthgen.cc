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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rtbbench/data_model.hpp"
#include "rtbbench/synthgen.hpp"

using namespace rtbbench;

namespace {

std::string dump(const Dataset& d) {
  std::ostringstream s;
  for (const auto& c : d.campaigns()) {
    s << c.campaign_id << ',' << c.campaign_start << ',' << c.campaign_end << ',' << c.auction_budget.minor() << ','
      << c.logical_category << ',' << c.region_id << '\n';
  }
  for (const auto& [id, stats] : d.stats()) {
    for (const auto& [period, slice] : stats) {
      for (std::size_t i = 0; i < slice.size(); ++i) {
        s << id << ',' << period << ',' << slice.bins[i] << ',' << slice.clicks[i] << ',' << slice.win_bid[i] << '\n';
      }
    }
  }
  return s.str();
}

}  // namespace

TEST_CASE("defaults validate and are normalized") {
  for (AuctionType t : {AuctionType::kVcg, AuctionType::kFp}) {
    const auto cfg = SynthConfig::defaults(t);
    CHECK_NOTHROW(cfg.validate());
    double s = 0.0;
    for (double w : cfg.duration_weights) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(cfg.categories.empty());
  }
  auto bad = SynthConfig::defaults(AuctionType::kVcg);
  bad.budget_weights[0] += 0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SynthConfig::defaults(AuctionType::kVcg);
  bad.categories.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("classes and bands") {
  CHECK(duration_class(kDay) == 0);
  CHECK(duration_class(kDay + kHour) == 1);
  CHECK(duration_class(6 * kDay) == 1);
  CHECK(duration_class(7 * kDay) == 2);
  CHECK(duration_class(14 * kDay) == 3);
  CHECK(duration_class(15 * kDay) == 4);
  CHECK(budget_band(0.0) == 0);
  CHECK(budget_band(499.99) == 0);
  CHECK(budget_band(500.0) == 1);
  CHECK(budget_band(9999.0) == 2);
  CHECK(budget_band(50000.0) == 3);
  CHECK(budget_band(50000.01) == 4);
}

TEST_CASE("generation is deterministic and shardable") {
  auto cfg = SynthConfig::defaults(AuctionType::kFp);
  cfg.n_campaigns = 30;
  cfg.seed = 11;
  const Dataset a = generate(cfg);
  CHECK(dump(a) == dump(generate(cfg)));

  const Dataset lo = generate_range(cfg, 0, 13);
  const Dataset hi = generate_range(cfg, 13, 100);
  CHECK(lo.campaigns().size() + hi.campaigns().size() == 30);
  CHECK(dump(lo) + dump(hi) != "");
  for (const auto& c : hi.campaigns()) {
    const Campaign* full = a.find_campaign(c.campaign_id);
    REQUIRE(full != nullptr);
    CHECK(full->auction_budget == c.auction_budget);
    CHECK(full->campaign_start == c.campaign_start);
    CHECK(dump(a.restrict_to({c.campaign_id})) == dump(hi.restrict_to({c.campaign_id})));
  }
  const auto rows = generate_campaigns(cfg);
  REQUIRE(rows.size() == 30);
  for (const auto& c : rows) CHECK(a.find_campaign(c.campaign_id)->campaign_end == c.campaign_end);

  cfg.seed = 12;
  CHECK(dump(generate(cfg)) != dump(a));
}

TEST_CASE("generated data passes validation") {
  for (AuctionType t : {AuctionType::kVcg, AuctionType::kFp}) {
    auto cfg = SynthConfig::defaults(t);
    cfg.n_campaigns = 40;
    cfg.seed = 3;
    const Dataset d = generate(cfg);
    const auto report = validate_dataset(d);
    for (const auto& c : report.checks) CHECK_MESSAGE(c.passed, c.name);
    for (const auto& [id, stats] : d.stats()) {
      for (const auto& [period, slice] : stats) {
        for (std::size_t i = 0; i < slice.size(); ++i) {
          CHECK(slice.clicks[i] >= 0.0);
          CHECK(slice.win_bid[i] >= 0.0);
          if (i > 0) CHECK(slice.bins[i - 1] < slice.bins[i]);
        }
      }
    }
  }
}

TEST_CASE("traffic calibration") {
  auto cfg = SynthConfig::defaults(AuctionType::kVcg);
  cfg.n_regions = 30;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    for (const auto& p : generate_traffic(cfg)) {
      const auto& s = p.shares();
      const double mx = *std::max_element(s.begin(), s.end());
      const double mn = *std::min_element(s.begin(), s.end());
      CHECK(mx / mn >= 25.0);
      CHECK(mx / mn <= 35.0);
      CHECK(std::fabs(p.week_mass() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("duration and budget mixes at n = 10^4") {
  for (AuctionType t : {AuctionType::kVcg, AuctionType::kFp}) {
    auto cfg = SynthConfig::defaults(t);
    cfg.n_campaigns = 10000;
    cfg.seed = 5;
    const auto cs = generate_campaigns(cfg);
    std::array<double, 5> dur{}, bud{};
    for (const auto& c : cs) {
      dur[static_cast<std::size_t>(duration_class(c.duration()))] += 1.0;
      bud[static_cast<std::size_t>(budget_band(static_cast<double>(c.auction_budget.minor()) /
                                               cfg.minor_per_currency()))] += 1.0;
    }
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::fabs(dur[k] / 1e4 - cfg.duration_weights[k]) <= 0.02);
      CHECK(std::fabs(bud[k] / 1e4 - cfg.budget_weights[k]) <= 0.02);
    }
    CHECK(dur[4] == 0.0);
    CHECK(bud[4] == 0.0);
  }
}

TEST_CASE("describe") {
  auto cfg = SynthConfig::defaults(AuctionType::kVcg);
  cfg.n_campaigns = 50;
  const Dataset d = generate(cfg);
  const auto j = describe(d, cfg.minor_per_currency());
  CHECK(j["campaigns"].get<std::size_t>() == 50);
  std::size_t total = 0;
  for (const auto& [k, v] : j["duration_days"].items()) total += v["count"].get<std::size_t>();
  CHECK(total == 50);
  CHECK(j["traffic"].size() == static_cast<std::size_t>(cfg.n_regions));
}
