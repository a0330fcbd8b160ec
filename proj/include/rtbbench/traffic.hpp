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
#include <string>

#include "rtbbench/common.hpp"

namespace rtbbench {

struct Campaign;

// Weekly contact-share curve of one region. Slot index is (dow - 1) * 24 + hour
// with dow = 1 on Sunday.
class TrafficProfile {
 public:
  TrafficProfile() = default;
  TrafficProfile(std::string region_id, const std::array<double, kSlotsPerWeek>& shares);

  static TrafficProfile uniform(std::string region_id = {});

  const std::string& region_id() const { return region_id_; }
  const std::array<double, kSlotsPerWeek>& shares() const { return shares_; }
  double slot(int index) const { return shares_.at(static_cast<std::size_t>(index)); }
  // Mass of one full week; 1 for a normalized profile.
  double week_mass() const { return prefix_[kSlotsPerWeek]; }
  // Share mass of [week start, week start + seconds_into_week).
  double mass_before(Timestamp seconds_into_week) const;

 private:
  std::string region_id_;
  std::array<double, kSlotsPerWeek> shares_{};
  std::array<double, kSlotsPerWeek + 1> prefix_{};
};

inline int slot_index(int dow, int hour) { return (dow - 1) * 24 + hour; }

// Week slot of an absolute timestamp. epoch_offset shifts the clock so that
// slot 0 (Sunday, 00:00) can be aligned with the anonymized dates.
int slot_of(Timestamp t, Timestamp epoch_offset = 0);

// Throws std::out_of_range for dow outside 1..7 or hour outside 0..23.
double share_at(const TrafficProfile& p, int dow, int hour);

// Share mass of [t_from, t_to). Partial hours are weighted linearly; every
// full week contributes week_mass().
double window_share(const TrafficProfile& p, Timestamp t_from, Timestamp t_to, Timestamp epoch_offset = 0);

struct TrafficWindow {
  double cur = 0.0;   // current step window
  double prev = 0.0;  // campaign start .. now
  double left = 0.0;  // now .. campaign end
  double all = 0.0;   // prev + left
};

// Throws std::out_of_range when now lies outside [campaign_start, campaign_end].
TrafficWindow window_for_campaign(const TrafficProfile& p, const Campaign& c, Timestamp now,
                                  Timestamp epoch_offset = 0, Timestamp step = kHour);
TrafficWindow window_for_span(const TrafficProfile& p, Timestamp start, Timestamp end, Timestamp now,
                              Timestamp epoch_offset = 0, Timestamp step = kHour);

}  // namespace rtbbench
