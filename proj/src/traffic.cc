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

#include "rtbbench/traffic.hpp"

#include <algorithm>
#include <stdexcept>

#include "rtbbench/data_model.hpp"

namespace rtbbench {

namespace {

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TrafficProfile::TrafficProfile(std::string region_id, const std::array<double, kSlotsPerWeek>& shares)
    : region_id_(std::move(region_id)), shares_(shares) {
  prefix_[0] = 0.0;
  for (int i = 0; i < kSlotsPerWeek; ++i) prefix_[i + 1] = prefix_[i] + shares_[i];
}

TrafficProfile TrafficProfile::uniform(std::string region_id) {
  std::array<double, kSlotsPerWeek> s;
  s.fill(1.0 / kSlotsPerWeek);
  return TrafficProfile(std::move(region_id), s);
}

double TrafficProfile::mass_before(Timestamp x) const {
  const auto slot = static_cast<std::size_t>(x / kHour);
  const Timestamp rem = x % kHour;
  if (slot >= kSlotsPerWeek) return prefix_[kSlotsPerWeek];
  return prefix_[slot] + shares_[slot] * (static_cast<double>(rem) / static_cast<double>(kHour));
}

int slot_of(Timestamp t, Timestamp epoch_offset) {
  const Timestamp shifted = t + epoch_offset;
  const Timestamp in_week = shifted - floor_div(shifted, kWeek) * kWeek;
  return static_cast<int>(in_week / kHour);
}

double share_at(const TrafficProfile& p, int dow, int hour) {
  if (dow < 1 || dow > 7) throw std::out_of_range("dow must be in 1..7");
  if (hour < 0 || hour > 23) throw std::out_of_range("hour must be in 0..23");
  return p.slot(slot_index(dow, hour));
}

double window_share(const TrafficProfile& p, Timestamp t_from, Timestamp t_to, Timestamp epoch_offset) {
  if (t_to <= t_from) return 0.0;
  const Timestamp a = t_from + epoch_offset;
  const Timestamp b = t_to + epoch_offset;
  const Timestamp wa = floor_div(a, kWeek);
  const Timestamp wb = floor_div(b, kWeek);
  const double whole = static_cast<double>(wb - wa) * p.week_mass();
  return whole + (p.mass_before(b - wb * kWeek) - p.mass_before(a - wa * kWeek));
}

TrafficWindow window_for_span(const TrafficProfile& p, Timestamp start, Timestamp end, Timestamp now,
                              Timestamp epoch_offset, Timestamp step) {
  if (now < start || now > end) throw std::out_of_range("timestamp outside campaign window");
  TrafficWindow w;
  w.prev = window_share(p, start, now, epoch_offset);
  w.left = window_share(p, now, end, epoch_offset);
  w.cur = window_share(p, now, std::min(now + step, end), epoch_offset);
  w.all = w.prev + w.left;
  return w;
}

TrafficWindow window_for_campaign(const TrafficProfile& p, const Campaign& c, Timestamp now,
                                  Timestamp epoch_offset, Timestamp step) {
  return window_for_span(p, c.campaign_start, c.campaign_end, now, epoch_offset, step);
}

}  // namespace rtbbench
