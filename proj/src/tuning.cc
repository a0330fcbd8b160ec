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

#include "rtbbench/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "rtbbench/csv.hpp"
#include "rtbbench/metrics.hpp"

namespace rtbbench {

TimeSplit split_time_disjoint(const std::vector<Campaign>& campaigns) {
  if (campaigns.size() < 2) throw std::invalid_argument("split needs at least 2 campaigns");
  std::set<Timestamp> cuts;
  for (const auto& c : campaigns) {
    cuts.insert(c.campaign_start);
    cuts.insert(c.campaign_end);
  }

  bool found = false;
  std::size_t best_min = 0;
  std::size_t best_dropped = 0;
  Timestamp best_cut = 0;
  for (Timestamp t : cuts) {
    std::size_t s1 = 0;
    std::size_t s2 = 0;
    for (const auto& c : campaigns) {
      if (c.campaign_end <= t) {
        ++s1;
      } else if (c.campaign_start >= t) {
        ++s2;
      }
    }
    if (s1 == 0 || s2 == 0) continue;
    const std::size_t m = std::min(s1, s2);
    const std::size_t dropped = campaigns.size() - s1 - s2;
    if (!found || m > best_min || (m == best_min && dropped < best_dropped)) {
      found = true;
      best_min = m;
      best_dropped = dropped;
      best_cut = t;
    }
  }
  if (!found) throw std::invalid_argument("no time cut separates the campaigns into two nonempty sets");

  TimeSplit split;
  split.cut = best_cut;
  for (const auto& c : campaigns) {
    if (c.campaign_end <= best_cut) {
      split.train.push_back(c.campaign_id);
    } else if (c.campaign_start >= best_cut) {
      split.validation.push_back(c.campaign_id);
    } else {
      split.dropped.push_back(c.campaign_id);
    }
  }
  return split;
}

TimeSplit split_time_disjoint(const Dataset& d) { return split_time_disjoint(d.campaigns()); }

namespace {

double parse_number(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw std::invalid_argument("search." + key + ": bad number '" + s + "'");
  return v;
}

}  // namespace

ParamDim ParamDim::parse(const std::string& key, const std::string& text) {
  ParamDim d;
  d.key = key;
  if (!text.empty() && text.front() == '{') {
    if (text.back() != '}') throw std::invalid_argument("search." + key + ": unterminated choice list");
    d.kind = Kind::kChoice;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      d.choices.push_back(parse_number(item, key));
    }
    return d;
  }
  std::string body = text;
  if (body.rfind("log:", 0) == 0) {
    d.kind = Kind::kLogUniform;
    body = body.substr(4);
  }
  const auto colon = body.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("search." + key + ": expected lo:hi");
  d.lo = parse_number(body.substr(0, colon), key);
  d.hi = parse_number(body.substr(colon + 1), key);
  return d;
}

bool ParamDim::contains(double v) const {
  if (kind == Kind::kChoice) return std::find(choices.begin(), choices.end(), v) != choices.end();
  return v >= lo && v <= hi;
}

void SearchSpace::validate() const {
  if (trials < 1) throw std::invalid_argument("search trial budget must be at least 1");
  if (!(refine_fraction >= 0.0 && refine_fraction < 1.0)) {
    throw std::invalid_argument("search refine fraction must be in [0, 1)");
  }
  for (const auto& d : dims) {
    if (!BidderParams::has_key(d.key)) throw std::invalid_argument("unknown search key: " + d.key);
    if (d.kind == ParamDim::Kind::kChoice) {
      if (d.choices.empty()) throw std::invalid_argument("search." + d.key + ": no choices");
      continue;
    }
    if (!(d.lo < d.hi)) throw std::invalid_argument("search." + d.key + ": bounds need lo < hi");
    if (d.kind == ParamDim::Kind::kLogUniform && !(d.lo > 0.0)) {
      throw std::invalid_argument("search." + d.key + ": log bounds must be positive");
    }
  }
}

bool SearchSpace::is_single_point() const {
  return std::all_of(dims.begin(), dims.end(),
                     [](const ParamDim& d) { return d.kind == ParamDim::Kind::kChoice && d.choices.size() == 1; });
}

SearchSpace SearchSpace::from_config(const Config& cfg) {
  SearchSpace s;
  s.trials = static_cast<int>(cfg.get_int("search.trials", 200));
  s.seed = static_cast<std::uint64_t>(cfg.get_int("search.seed", 0));
  s.refine_fraction = cfg.get_double("search.refine", 0.0);
  for (const auto& [key, value] : cfg.entries()) {
    if (key.rfind("search.", 0) != 0) continue;
    const std::string name = key.substr(7);
    if (name == "trials" || name == "seed" || name == "refine") continue;
    s.dims.push_back(ParamDim::parse(name, value));
  }
  s.validate();
  return s;
}

SearchSpace SearchSpace::restricted_to(Algorithm a) const {
  SearchSpace s = *this;
  const auto keys = BidderParams::keys(a);
  s.dims.clear();
  for (const auto& d : dims) {
    if (std::find(keys.begin(), keys.end(), d.key) != keys.end()) s.dims.push_back(d);
  }
  return s;
}

std::vector<ParamDim> default_search_dims(Algorithm a) {
  std::vector<std::pair<const char*, const char*>> ranges{{"b0", "log:1:100000"}};
  switch (a) {
    case Algorithm::kAlm:
      ranges.insert(ranges.end(), {{"alm.beta", "log:0.1:100"}, {"alm.clip_hi", "0.1:4"}});
      break;
    case Algorithm::kTaPid:
      ranges.insert(ranges.end(), {{"tapid.kp", "log:0.01:30"}, {"tapid.ki", "0:10"}, {"tapid.kd", "0:0.1"}});
      break;
    case Algorithm::kMPid:
      ranges.insert(ranges.end(), {{"mpid.p0", "log:1e-7:1e-1"},
                                   {"mpid.q0", "log:1e-7:1e-1"},
                                   {"mpid.spend_kp", "log:0.001:50"},
                                   {"mpid.cpc_kp", "log:0.001:20"}});
      break;
    case Algorithm::kMystique:
      ranges.insert(ranges.end(), {{"mystique.alpha", "log:0.1:300"}, {"mystique.beta", "0:1"}});
      break;
    case Algorithm::kBroi:
      ranges.insert(ranges.end(), {{"broi.eta_b", "log:0.01:100"}, {"broi.eta_r", "log:0.01:100"}});
      break;
  }
  std::vector<ParamDim> dims;
  for (const auto& [key, text] : ranges) dims.push_back(ParamDim::parse(key, text));
  return dims;
}

namespace {

double sample_dim(const ParamDim& d, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  switch (d.kind) {
    case ParamDim::Kind::kUniform:
      return d.lo + u * (d.hi - d.lo);
    case ParamDim::Kind::kLogUniform:
      return std::exp(std::log(d.lo) + u * (std::log(d.hi) - std::log(d.lo)));
    case ParamDim::Kind::kChoice: {
      auto i = static_cast<std::size_t>(u * static_cast<double>(d.choices.size()));
      return d.choices[std::min(i, d.choices.size() - 1)];
    }
  }
  return d.lo;
}

// Perturbs one incumbent coordinate within a shrinking radius.
double refine_dim(const ParamDim& d, double center, double radius, std::mt19937_64& rng) {
  const double u = 2.0 * uniform01(rng) - 1.0;
  switch (d.kind) {
    case ParamDim::Kind::kUniform:
      return std::clamp(center + u * radius * (d.hi - d.lo), d.lo, d.hi);
    case ParamDim::Kind::kLogUniform: {
      const double l = std::log(center) + u * radius * (std::log(d.hi) - std::log(d.lo));
      return std::clamp(std::exp(l), d.lo, d.hi);
    }
    case ParamDim::Kind::kChoice:
      return sample_dim(d, rng);
  }
  return center;
}

BidderParams apply(const BidderParams& base, const SearchSpace& space, const std::vector<double>& values) {
  BidderParams p = base;
  for (std::size_t i = 0; i < space.dims.size(); ++i) p.set(space.dims[i].key, values[i]);
  return p;
}

void run_trials(std::vector<Trial>& trials, std::size_t from, const SearchSpace& space, const BidderParams& base,
                const Objective& objective, int jobs) {
  auto one = [&](std::size_t i) { trials[i].score = objective(apply(base, space, trials[i].values)); };
  const std::size_t n = trials.size() - from;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), n);
  if (workers <= 1) {
    for (std::size_t i = from; i < trials.size(); ++i) one(i);
    return;
  }
  std::atomic<std::size_t> next{from};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < trials.size(); i = next++) {
        try {
          one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::size_t argmax(const std::vector<Trial>& trials) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].score > trials[best].score) best = i;
  }
  return best;
}

}  // namespace

SearchResult search(const SearchSpace& space, const BidderParams& base, const Objective& objective, int jobs) {
  space.validate();
  std::mt19937_64 rng(space.seed);
  std::vector<Trial> trials;

  auto push = [&](std::vector<double> values) {
    Trial t;
    t.index = static_cast<int>(trials.size());
    t.values = std::move(values);
    trials.push_back(std::move(t));
  };

  if (space.is_single_point()) {
    std::vector<double> v;
    for (const auto& d : space.dims) v.push_back(d.choices.front());
    push(std::move(v));
    run_trials(trials, 0, space, base, objective, 1);
  } else {
    const int refine = static_cast<int>(std::floor(space.refine_fraction * space.trials));
    const int explore = space.trials - refine;
    for (int i = 0; i < explore; ++i) {
      std::vector<double> v;
      for (const auto& d : space.dims) v.push_back(sample_dim(d, rng));
      push(std::move(v));
    }
    run_trials(trials, 0, space, base, objective, jobs);
    // Refinement rounds halve the radius; each round samples around the
    // incumbent, so rounds run in order but trials within a round may not.
    double radius = 0.25;
    int remaining = refine;
    while (remaining > 0) {
      const int round = std::max(1, std::min(remaining, std::max(1, refine / 4)));
      const std::vector<double> center = trials[argmax(trials)].values;
      const std::size_t from = trials.size();
      for (int i = 0; i < round; ++i) {
        std::vector<double> v;
        for (std::size_t k = 0; k < space.dims.size(); ++k) {
          v.push_back(refine_dim(space.dims[k], center[k], radius, rng));
        }
        push(std::move(v));
      }
      run_trials(trials, from, space, base, objective, jobs);
      remaining -= round;
      radius /= 2.0;
    }
  }

  SearchResult r;
  const std::size_t b = argmax(trials);
  r.best_trial = static_cast<int>(b);
  r.best_score = trials[b].score;
  r.best = apply(base, space, trials[b].values);
  r.trials = std::move(trials);
  return r;
}

void SearchResult::write_csv(std::ostream& out, const SearchSpace& space) const {
  std::vector<std::string> header{"trial"};
  for (const auto& d : space.dims) header.push_back(d.key);
  header.push_back("score");
  csv::write_row(out, header);
  for (const auto& t : trials) {
    std::vector<std::string> row{std::to_string(t.index)};
    for (double v : t.values) row.push_back(csv::format_double(v));
    row.push_back(csv::format_double(t.score));
    csv::write_row(out, row);
  }
}

TuneMetric parse_tune_metric(const std::string& s) {
  if (s == "scr") return TuneMetric::kScr;
  if (s == "rmse_t") return TuneMetric::kRmseT;
  if (s == "rel_cpc") return TuneMetric::kRelCpc;
  if (s == "cpc_scr") return TuneMetric::kCpcScr;
  throw std::invalid_argument("unknown tuning metric: " + s);
}

std::string to_string(TuneMetric m) {
  switch (m) {
    case TuneMetric::kScr:
      return "scr";
    case TuneMetric::kRmseT:
      return "rmse_t";
    case TuneMetric::kRelCpc:
      return "rel_cpc";
    case TuneMetric::kCpcScr:
      return "cpc_scr";
  }
  return "scr";
}

double evaluate(const BidderParams& params, const Dataset& d, const EvalSetup& setup) {
  if (d.campaigns().empty()) throw std::invalid_argument("evaluate: empty campaign set");
  SimulationConfig sim = setup.sim;
  sim.keep_trajectories = false;
  const BidderFactory factory = make_bidder_factory(params, setup.cpc, d, sim.money_scale);
  const ExperimentResult res = run_experiment(d, factory, sim);
  switch (setup.metric) {
    case TuneMetric::kScr:
      return scr(res);
    case TuneMetric::kRmseT: {
      double total = 0.0;
      for (const auto& c : res.campaigns) total += c.rmse_t_norm;
      return -total / static_cast<double>(res.campaigns.size());
    }
    case TuneMetric::kRelCpc:
    case TuneMetric::kCpcScr: {
      std::vector<double> caps;
      for (const auto& c : res.campaigns) {
        const BidderParams p = factory(*d.find_campaign(c.campaign_id));
        caps.push_back(p.cpc_limit.value_or(static_cast<double>(c.budget.minor()) / sim.money_scale));
      }
      const std::optional<double> rel = rel_cpc(res, caps);
      if (setup.metric == TuneMetric::kRelCpc) return rel ? -*rel : std::numeric_limits<double>::lowest();
      if (!rel) return 0.0;
      return *rel <= 1.0 ? scr(res) : -*rel;
    }
  }
  return 0.0;
}

}  // namespace rtbbench
