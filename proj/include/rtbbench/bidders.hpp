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

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rtbbench/common.hpp"
#include "rtbbench/traffic.hpp"

namespace rtbbench {

enum class Algorithm { kAlm, kTaPid, kMPid, kMystique, kBroi };

std::string_view to_string(Algorithm a);
// Accepts "alm", "ta-pid"/"tapid", "m-pid"/"mpid", "mystique", "broi".
Algorithm parse_algorithm(std::string_view s);
const std::vector<Algorithm>& all_algorithms();

// floor(log(bid) / log(gamma)), snapping to the exact integer when bid is a
// power of gamma up to rounding. Throws std::invalid_argument for bid <= 0.
std::int32_t bin_of(double bid, double gamma);
double bid_of(double delta, double gamma);

struct BidderParams {
  Algorithm algorithm = Algorithm::kTaPid;
  double gamma = kDefaultGamma;
  double b0 = 3600.0;  // cold-start bid, in bid money units

  double alm_beta = 4.0;
  double alm_clip_lo = -1.0;
  double alm_clip_hi = 1.0;

  double tapid_kp = 1.0;
  double tapid_ki = 0.0;
  double tapid_kd = 0.0;
  // Divide the spend-rate error by the initial budget before applying gains.
  bool tapid_normalize = true;

  double mpid_p0 = 1e-3;
  double mpid_q0 = 1e-3;
  double mpid_spend_kp = 2.0;
  double mpid_spend_ki = 0.0;
  double mpid_spend_kd = 0.0;
  double mpid_cpc_kp = 0.5;
  double mpid_cpc_ki = 0.0;
  double mpid_cpc_kd = 0.0;
  double mpid_coupling = 0.0;
  std::optional<double> mpid_clicks_target;

  double mystique_alpha = 30.0;
  double mystique_beta = 0.0;
  int mystique_window = 1;

  double broi_eta_b = 5.0;
  double broi_eta_r = 5.0;
  double broi_mu_max = 1000.0;
  double broi_mu_b0 = 0.0;
  double broi_mu_r0 = 0.0;

  // CPC cap C in bid money units; consumed by M-PID and BROI.
  std::optional<double> cpc_limit;

  // Flat keys such as "alm.beta" or "tapid.kp"; throws std::invalid_argument
  // on unknown keys.
  void set(std::string_view key, double value);
  double get(std::string_view key) const;
  static bool has_key(std::string_view key);
  // Keys relevant to one algorithm (shared keys first).
  static std::vector<std::string> keys(Algorithm a);

  // Throws std::invalid_argument when gamma <= 1, b0 <= 0 or a gain is not finite.
  void validate() const;
};

// Everything a controller may look at before choosing the next bid. Money is
// in bid units (minor units divided by the engine's money scale).
struct BidderObservation {
  Timestamp now = 0;
  double budget = 0.0;   // B0
  double balance = 0.0;  // B_n
  double spend_last_step = 0.0;
  double clicks_last_step = 0.0;
  double contacts_last_step = 0.0;
  TrafficWindow traffic;
  double ctr = 0.0;
  double cvr = 0.0;
};

struct AlmState {
  double delta = 0.0;
  double prev_rel_balance = 1.0;
  double prev_traffic = 0.0;
};

struct TaPidState {
  double delta = 0.0;
  double s_ideal = 0.0;
  double integral = 0.0;
  double prev_error = 0.0;
  double prev_traffic = 0.0;
};

struct PidLoop {
  double integral = 0.0;
  double prev_error = 0.0;

  double update(double error, double kp, double ki, double kd);
};

struct MPidState {
  double p = 1.0;
  double q = 1.0;
  double cpc_limit = 0.0;
  double spend_ref = 0.0;
  double total_clicks = 0.0;
  PidLoop spend_loop;
  PidLoop cpc_loop;
  // Last control signals, kept for inspection.
  double u_spend = 0.0;
  double u_cpc = 0.0;
};

struct MystiqueState {
  double delta = 0.0;
  // (T_prev, spent) at each observation, newest last; at most window + 1 kept.
  std::deque<std::pair<double, double>> history;
};

struct BroiState {
  double mu_b = 0.0;
  double mu_r = 0.0;
  double cpc_limit = 0.0;
  double pace_share = 0.0;  // T_cur / T_all at the previous bid
};

struct BidderState {
  BidderParams params;
  std::int64_t steps = 0;
  std::variant<AlmState, TaPidState, MPidState, MystiqueState, BroiState> algo;

  // Real-valued control level, or NaN for the dual-price controllers.
  double delta() const;
};

struct StepResult {
  BidderState state;
  double bid = 0.0;  // <= 0 means abstain
};

BidderState init_bidder(const BidderParams& params);

// Pure step functions. The first call of each plays the cold-start bid b0.
StepResult alm_step(const BidderState& state, const BidderObservation& obs);
StepResult tapid_step(const BidderState& state, const BidderObservation& obs);
StepResult mpid_step(const BidderState& state, const BidderObservation& obs);
StepResult mystique_step(const BidderState& state, const BidderObservation& obs);
StepResult broi_step(const BidderState& state, const BidderObservation& obs);
StepResult bidder_step(const BidderState& state, const BidderObservation& obs);

// Owning wrapper used by the simulator.
class Bidder {
 public:
  explicit Bidder(const BidderParams& params) : state_(init_bidder(params)) {}

  double next_bid(const BidderObservation& obs) {
    StepResult r = bidder_step(state_, obs);
    state_ = std::move(r.state);
    return r.bid;
  }
  const BidderState& state() const { return state_; }
  const BidderParams& params() const { return state_.params; }

 private:
  BidderState state_;
};

}  // namespace rtbbench
