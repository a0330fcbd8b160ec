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

#include "rtbbench/bidders.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rtbbench {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAlm:
      return "ALM";
    case Algorithm::kTaPid:
      return "TA-PID";
    case Algorithm::kMPid:
      return "M-PID";
    case Algorithm::kMystique:
      return "Mystique";
    case Algorithm::kBroi:
      return "BROI";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  std::string k(s);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char ch) { return std::tolower(ch); });
  k.erase(std::remove_if(k.begin(), k.end(), [](char ch) { return ch == '-' || ch == '_'; }), k.end());
  if (k == "alm") return Algorithm::kAlm;
  if (k == "tapid") return Algorithm::kTaPid;
  if (k == "mpid") return Algorithm::kMPid;
  if (k == "mystique") return Algorithm::kMystique;
  if (k == "broi") return Algorithm::kBroi;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> v{Algorithm::kAlm, Algorithm::kTaPid, Algorithm::kMPid, Algorithm::kMystique,
                                        Algorithm::kBroi};
  return v;
}

std::int32_t bin_of(double bid, double gamma) {
  if (!(bid > 0.0)) throw std::invalid_argument("bid must be positive");
  const double x = std::log(bid) / std::log(gamma);
  const double r = std::round(x);
  if (std::fabs(x - r) < 1e-9) return static_cast<std::int32_t>(r);
  return static_cast<std::int32_t>(std::floor(x));
}

double bid_of(double delta, double gamma) { return std::pow(gamma, delta); }

// ---------------------------------------------------------------------------
// Parameter registry

namespace {

struct ParamEntry {
  const char* key;
  std::optional<Algorithm> algorithm;  // nullopt: shared
  std::function<double(const BidderParams&)> get;
  std::function<void(BidderParams&, double)> set;
};

#define RTB_PARAM(KEY, ALGO, FIELD)                              \
  ParamEntry {                                                   \
    KEY, ALGO, [](const BidderParams& p) { return p.FIELD; },    \
        [](BidderParams& p, double v) { p.FIELD = v; }           \
  }

const std::vector<ParamEntry>& registry() {
  static const std::vector<ParamEntry> r = {
      RTB_PARAM("b0", std::nullopt, b0),
      RTB_PARAM("alm.beta", Algorithm::kAlm, alm_beta),
      RTB_PARAM("alm.clip_lo", Algorithm::kAlm, alm_clip_lo),
      RTB_PARAM("alm.clip_hi", Algorithm::kAlm, alm_clip_hi),
      RTB_PARAM("tapid.kp", Algorithm::kTaPid, tapid_kp),
      RTB_PARAM("tapid.ki", Algorithm::kTaPid, tapid_ki),
      RTB_PARAM("tapid.kd", Algorithm::kTaPid, tapid_kd),
      ParamEntry{"tapid.normalize", Algorithm::kTaPid,
                 [](const BidderParams& p) { return p.tapid_normalize ? 1.0 : 0.0; },
                 [](BidderParams& p, double v) { p.tapid_normalize = v != 0.0; }},
      RTB_PARAM("mpid.p0", Algorithm::kMPid, mpid_p0),
      RTB_PARAM("mpid.q0", Algorithm::kMPid, mpid_q0),
      RTB_PARAM("mpid.spend_kp", Algorithm::kMPid, mpid_spend_kp),
      RTB_PARAM("mpid.spend_ki", Algorithm::kMPid, mpid_spend_ki),
      RTB_PARAM("mpid.spend_kd", Algorithm::kMPid, mpid_spend_kd),
      RTB_PARAM("mpid.cpc_kp", Algorithm::kMPid, mpid_cpc_kp),
      RTB_PARAM("mpid.cpc_ki", Algorithm::kMPid, mpid_cpc_ki),
      RTB_PARAM("mpid.cpc_kd", Algorithm::kMPid, mpid_cpc_kd),
      RTB_PARAM("mpid.coupling", Algorithm::kMPid, mpid_coupling),
      ParamEntry{"mpid.clicks_target", Algorithm::kMPid,
                 [](const BidderParams& p) { return p.mpid_clicks_target.value_or(0.0); },
                 [](BidderParams& p, double v) {
                   p.mpid_clicks_target = v > 0.0 ? std::optional<double>(v) : std::nullopt;
                 }},
      RTB_PARAM("mystique.alpha", Algorithm::kMystique, mystique_alpha),
      RTB_PARAM("mystique.beta", Algorithm::kMystique, mystique_beta),
      ParamEntry{"mystique.window", Algorithm::kMystique,
                 [](const BidderParams& p) { return static_cast<double>(p.mystique_window); },
                 [](BidderParams& p, double v) { p.mystique_window = std::max(1, static_cast<int>(std::lround(v))); }},
      RTB_PARAM("broi.eta_b", Algorithm::kBroi, broi_eta_b),
      RTB_PARAM("broi.eta_r", Algorithm::kBroi, broi_eta_r),
      RTB_PARAM("broi.mu_max", Algorithm::kBroi, broi_mu_max),
      RTB_PARAM("broi.mu_b0", Algorithm::kBroi, broi_mu_b0),
      RTB_PARAM("broi.mu_r0", Algorithm::kBroi, broi_mu_r0),
  };
  return r;
}

#undef RTB_PARAM

const ParamEntry& lookup(std::string_view key) {
  for (const auto& e : registry()) {
    if (key == e.key) return e;
  }
  throw std::invalid_argument("unknown bidder parameter '" + std::string(key) + "'");
}

}  // namespace

void BidderParams::set(std::string_view key, double value) { lookup(key).set(*this, value); }

double BidderParams::get(std::string_view key) const { return lookup(key).get(*this); }

bool BidderParams::has_key(std::string_view key) {
  return std::any_of(registry().begin(), registry().end(), [&](const ParamEntry& e) { return key == e.key; });
}

std::vector<std::string> BidderParams::keys(Algorithm a) {
  std::vector<std::string> out;
  for (const auto& e : registry()) {
    if (!e.algorithm || *e.algorithm == a) out.emplace_back(e.key);
  }
  return out;
}

void BidderParams::validate() const {
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 1");
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw std::invalid_argument("b0 must be > 0");
  for (const auto& e : registry()) {
    if (!std::isfinite(e.get(*this))) throw std::invalid_argument(std::string("parameter not finite: ") + e.key);
  }
  if (alm_clip_lo > alm_clip_hi) throw std::invalid_argument("alm.clip_lo must not exceed alm.clip_hi");
  if (mpid_p0 <= 0.0 || mpid_q0 <= 0.0) throw std::invalid_argument("mpid.p0 and mpid.q0 must be positive");
  if (broi_mu_b0 < 0.0 || broi_mu_r0 < 0.0 || broi_mu_max < 0.0) {
    throw std::invalid_argument("BROI multipliers must be non-negative");
  }
  if (cpc_limit && !(*cpc_limit > 0.0)) throw std::invalid_argument("cpc_limit must be positive");
}

// ---------------------------------------------------------------------------
// Controllers

double PidLoop::update(double error, double kp, double ki, double kd) {
  integral += error;
  const double u = kp * error + ki * integral + kd * (error - prev_error);
  prev_error = error;
  return u;
}

double BidderState::delta() const {
  if (const auto* s = std::get_if<AlmState>(&algo)) return s->delta;
  if (const auto* s = std::get_if<TaPidState>(&algo)) return s->delta;
  if (const auto* s = std::get_if<MystiqueState>(&algo)) return s->delta;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

constexpr double kMultiplierFloor = 1e-9;
constexpr double kMultiplierCeil = 1e12;

double cold_delta(const BidderParams& p) { return std::log(p.b0) / std::log(p.gamma); }

// gamma^delta, returning b0 exactly while delta sits at its cold-start value.
double play(double delta, const BidderParams& p) {
  if (delta == cold_delta(p)) return p.b0;
  return bid_of(delta, p.gamma);
}

double resolve_cpc_limit(const BidderParams& p, double budget) {
  if (p.cpc_limit) return *p.cpc_limit;
  if (p.mpid_clicks_target && *p.mpid_clicks_target > 0.0) return budget / *p.mpid_clicks_target;
  return budget;
}

template <typename S>
S& algo_state(BidderState& st) {
  return std::get<S>(st.algo);
}

void expect(const BidderState& st, Algorithm a) {
  if (st.params.algorithm != a) throw std::invalid_argument("bidder state belongs to another algorithm");
}

}  // namespace

BidderState init_bidder(const BidderParams& params) {
  params.validate();
  BidderState st;
  st.params = params;
  switch (params.algorithm) {
    case Algorithm::kAlm:
      st.algo = AlmState{};
      break;
    case Algorithm::kTaPid:
      st.algo = TaPidState{};
      break;
    case Algorithm::kMPid:
      st.algo = MPidState{};
      break;
    case Algorithm::kMystique:
      st.algo = MystiqueState{};
      break;
    case Algorithm::kBroi:
      st.algo = BroiState{};
      break;
  }
  return st;
}

StepResult alm_step(const BidderState& state, const BidderObservation& obs) {
  expect(state, Algorithm::kAlm);
  StepResult r{state, 0.0};
  const BidderParams& p = r.state.params;
  auto& s = algo_state<AlmState>(r.state);
  const double rel = obs.budget > 0.0 ? obs.balance / obs.budget : 0.0;
  if (r.state.steps++ == 0) {
    s.delta = cold_delta(p);
    s.prev_rel_balance = rel;
    s.prev_traffic = obs.traffic.prev;
    r.bid = p.b0;
    return r;
  }
  const double dt = obs.traffic.prev - s.prev_traffic;
  const double slope = dt > 0.0 ? (rel - s.prev_rel_balance) / dt : 0.0;
  const double predicted_left = rel + slope * obs.traffic.left;
  const double step = std::clamp(predicted_left * p.alm_beta, p.alm_clip_lo, p.alm_clip_hi);
  s.delta += step;
  s.prev_rel_balance = rel;
  s.prev_traffic = obs.traffic.prev;
  r.bid = play(s.delta, p);
  return r;
}

StepResult tapid_step(const BidderState& state, const BidderObservation& obs) {
  expect(state, Algorithm::kTaPid);
  StepResult r{state, 0.0};
  const BidderParams& p = r.state.params;
  auto& s = algo_state<TaPidState>(r.state);
  if (r.state.steps++ == 0) {
    s.delta = cold_delta(p);
    s.s_ideal = obs.traffic.all > 0.0 ? obs.budget / obs.traffic.all : 0.0;
    s.integral = 0.0;
    s.prev_error = 0.0;
    s.prev_traffic = obs.traffic.prev;
    r.bid = p.b0;
    return r;
  }
  double e = 0.0;
  if (obs.traffic.prev > 0.0) e = s.s_ideal - (obs.budget - obs.balance) / obs.traffic.prev;
  if (p.tapid_normalize && obs.budget > 0.0) e /= obs.budget;
  const double dt = obs.traffic.prev - s.prev_traffic;
  s.integral += e * dt;
  const double derivative = dt > 0.0 ? (e - s.prev_error) / dt : 0.0;
  const double u = p.tapid_kp * e + p.tapid_ki * s.integral + p.tapid_kd * derivative;
  s.delta += u;
  s.prev_error = e;
  s.prev_traffic = obs.traffic.prev;
  r.bid = play(s.delta, p);
  return r;
}

StepResult mpid_step(const BidderState& state, const BidderObservation& obs) {
  expect(state, Algorithm::kMPid);
  StepResult r{state, 0.0};
  const BidderParams& p = r.state.params;
  auto& s = algo_state<MPidState>(r.state);
  auto spend_reference = [&obs] {
    return obs.traffic.left > 0.0 ? obs.balance * obs.traffic.cur / obs.traffic.left : obs.balance;
  };
  if (r.state.steps++ == 0) {
    s.p = p.mpid_p0;
    s.q = p.mpid_q0;
    s.cpc_limit = resolve_cpc_limit(p, obs.budget);
    s.spend_ref = spend_reference();
    s.total_clicks = 0.0;
    r.bid = p.b0;
    return r;
  }
  s.total_clicks += obs.clicks_last_step;
  const double scale = obs.budget > 0.0 ? obs.budget : 1.0;
  const double spend_error = (s.spend_ref - obs.spend_last_step) / scale;
  double cpc_error = 0.0;
  if (s.total_clicks > 0.0 && s.cpc_limit > 0.0) {
    const double realized = (obs.budget - obs.balance) / s.total_clicks;
    cpc_error = (s.cpc_limit - realized) / s.cpc_limit;
  }
  double u_spend = s.spend_loop.update(spend_error, p.mpid_spend_kp, p.mpid_spend_ki, p.mpid_spend_kd);
  double u_cpc = s.cpc_loop.update(cpc_error, p.mpid_cpc_kp, p.mpid_cpc_ki, p.mpid_cpc_kd);
  const double coupled_spend = u_spend + p.mpid_coupling * u_cpc;
  const double coupled_cpc = u_cpc + p.mpid_coupling * u_spend;
  u_spend = coupled_spend;
  u_cpc = coupled_cpc;
  s.u_spend = u_spend;
  s.u_cpc = u_cpc;
  s.p = std::clamp(s.p * std::exp(-u_spend), kMultiplierFloor, kMultiplierCeil);
  s.q = std::clamp(s.q * std::exp(-u_cpc), kMultiplierFloor, kMultiplierCeil);
  s.spend_ref = spend_reference();
  if (obs.balance <= 0.0) return r;
  r.bid = (obs.ctr * obs.cvr + s.q * obs.ctr * s.cpc_limit) / (s.p + s.q);
  return r;
}

StepResult mystique_step(const BidderState& state, const BidderObservation& obs) {
  expect(state, Algorithm::kMystique);
  StepResult r{state, 0.0};
  const BidderParams& p = r.state.params;
  auto& s = algo_state<MystiqueState>(r.state);
  const double spent = obs.budget - obs.balance;
  s.history.emplace_back(obs.traffic.prev, spent);
  while (s.history.size() > static_cast<std::size_t>(p.mystique_window) + 1) s.history.pop_front();
  if (r.state.steps++ == 0) {
    s.delta = cold_delta(p);
    r.bid = p.b0;
    return r;
  }
  double gap = 0.0, slope_diff = 0.0;
  if (obs.budget > 0.0 && obs.traffic.all > 0.0) {
    const double ideal_spent = obs.budget * obs.traffic.prev / obs.traffic.all;
    gap = (ideal_spent - spent) / obs.budget;
    const auto& [t_old, spent_old] = s.history.front();
    const double dt = obs.traffic.prev - t_old;
    if (dt > 0.0) {
      const double actual_rate = (spent - spent_old) / dt;
      const double ideal_rate = obs.budget / obs.traffic.all;
      slope_diff = (ideal_rate - actual_rate) / obs.budget;
    }
  }
  s.delta += p.mystique_alpha * gap + p.mystique_beta * slope_diff;
  r.bid = play(s.delta, p);
  return r;
}

StepResult broi_step(const BidderState& state, const BidderObservation& obs) {
  expect(state, Algorithm::kBroi);
  StepResult r{state, 0.0};
  const BidderParams& p = r.state.params;
  auto& s = algo_state<BroiState>(r.state);
  const double pace = obs.traffic.all > 0.0 ? obs.traffic.cur / obs.traffic.all : 0.0;
  if (r.state.steps++ == 0) {
    s.mu_b = std::min(p.broi_mu_b0, p.broi_mu_max);
    s.mu_r = std::min(p.broi_mu_r0, p.broi_mu_max);
    s.cpc_limit = resolve_cpc_limit(p, obs.budget);
    s.pace_share = pace;
    r.bid = obs.balance > 0.0 ? p.b0 : 0.0;
    return r;
  }
  const double scale = obs.budget > 0.0 ? obs.budget : 1.0;
  const double budget_grad = (obs.spend_last_step - obs.budget * s.pace_share) / scale;
  const double roi_grad = (obs.spend_last_step - s.cpc_limit * obs.clicks_last_step) / scale;
  s.mu_b = std::clamp(s.mu_b + p.broi_eta_b * budget_grad, 0.0, p.broi_mu_max);
  s.mu_r = std::clamp(s.mu_r + p.broi_eta_r * roi_grad, 0.0, p.broi_mu_max);
  s.pace_share = pace;
  if (obs.balance <= 0.0) return r;
  r.bid = obs.ctr * s.cpc_limit / (1.0 + s.mu_b + s.mu_r);
  return r;
}

StepResult bidder_step(const BidderState& state, const BidderObservation& obs) {
  switch (state.params.algorithm) {
    case Algorithm::kAlm:
      return alm_step(state, obs);
    case Algorithm::kTaPid:
      return tapid_step(state, obs);
    case Algorithm::kMPid:
      return mpid_step(state, obs);
    case Algorithm::kMystique:
      return mystique_step(state, obs);
    case Algorithm::kBroi:
      return broi_step(state, obs);
  }
  throw std::logic_error("unreachable");
}

}  // namespace rtbbench
