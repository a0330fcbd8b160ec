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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rtbbench/cli.hpp"
#include "rtbbench/metrics.hpp"
#include "rtbbench/simulation.hpp"
#include "rtbbench/synthgen.hpp"
#include "rtbbench/tuning.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace rtbbench;
using rtbtest::ToyRow;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

int jobs() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

Dataset synthetic(AuctionType t, std::size_t n, std::uint64_t seed) {
  auto cfg = SynthConfig::defaults(t);
  cfg.n_campaigns = n;
  cfg.seed = seed;
  return generate(cfg);
}

SimulationConfig sim_for(const Dataset& d, double scale) {
  SimulationConfig s = SimulationConfig::for_dataset(d);
  s.money_scale = scale;
  return s;
}

const double kScale = SynthConfig::defaults(AuctionType::kVcg).money_scale;

// ---------------------------------------------------------------------------

void conservation(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t campaigns = 0, steps = 0;
  for (AuctionType type : {AuctionType::kVcg, AuctionType::kFp}) {
    const Dataset d = synthetic(type, 1000, 2024);
    SimulationConfig sim = sim_for(d, kScale);
    sim.jobs = jobs();
    for (Algorithm a : all_algorithms()) {
      BidderParams p;
      p.algorithm = a;
      const auto r = run_experiment(d, make_bidder_factory(p, CpcPolicy::parse("category-div-10"), d, kScale), sim);
      for (const auto& c : r.campaigns) {
        const auto& t = *c.trajectory;
        std::int64_t written = 0;
        for (const auto& s : t.steps) {
          if (s.balance.minor() < 0 || s.balance_after().minor() < 0) o.fail("negative balance in " + c.campaign_id);
          written += s.feedback.write_off.minor();
        }
        ++campaigns;
        steps += t.steps.size();
        o.require(t.initial_budget.minor() == t.final_balance.minor() + written,
                  "budget != final + write-offs for " + c.campaign_id);
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 30.0, "runtime over 30 s");
  o.detail << campaigns << " campaign runs, " << steps << " steps, " << secs << " s on " << jobs() << " threads";
}

void pricing(Outcome& o) {
  std::mt19937_64 rng(77);
  std::size_t checks = 0;
  const double gamma = kDefaultGamma;
  for (int table = 0; table < 100; ++table) {
    const int periods = 1 + static_cast<int>(rng() % 5);
    for (int p = 0; p < periods; ++p) {
      const auto rows = rtbtest::random_rows(rng, 6);
      const auto slice = rtbtest::to_slice(rows);
      for (std::int32_t delta = -4; delta <= 14; ++delta) {
        const double bid = std::pow(gamma, delta);
        const auto got = step_outcomes(slice, delta);
        const auto want = rtbtest::brute_outcomes(rows, delta);
        const bool ok = rtbtest::rel_close(vcg_expected_price(slice, delta), rtbtest::brute_vcg_price(rows, delta), 1e-12) &&
                        rtbtest::rel_close(fp_expected_price(slice, delta, bid), rtbtest::brute_fp_price(rows, delta, bid), 1e-12) &&
                        rtbtest::rel_close(got.clicks, want.clicks, 1e-12) &&
                        rtbtest::rel_close(got.contacts, want.contacts, 1e-12) &&
                        rtbtest::rel_close(got.visibility, want.visibility, 1e-12);
        o.require(ok, "table " + std::to_string(table) + " delta " + std::to_string(delta));
        ++checks;
      }
    }
  }
  o.detail << checks << " (slice, delta) comparisons at 1e-12";
}

BidderObservation observe(double budget, double balance, double prev, double all, double cur) {
  BidderObservation ob;
  ob.budget = budget;
  ob.balance = balance;
  ob.traffic.prev = prev;
  ob.traffic.left = all - prev;
  ob.traffic.all = all;
  ob.traffic.cur = cur;
  ob.ctr = 0.05;
  ob.cvr = 0.02;
  return ob;
}

void fixpoints(Outcome& o) {
  double worst_drift = 0.0, worst_alm = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    BidderParams zero;
    zero.algorithm = Algorithm::kTaPid;
    zero.tapid_kp = zero.tapid_ki = zero.tapid_kd = 0.0;
    zero.b0 = 1.0 + 100.0 * u(rng);
    Bidder flat(zero);
    double t = 0.0;
    for (int n = 0; n < 10000; ++n) {
      const double inc = 1e-4 * u(rng);
      if (flat.next_bid(observe(1000, 1000 * u(rng), t, 2.0, inc)) != zero.b0) {
        o.fail("zero-gain TA-PID left b0 at seed " + std::to_string(seed));
        break;
      }
      t += inc;
    }

    // On-pace spend: balance tracks B0 * (1 - T_prev / T_all) exactly.
    for (Algorithm a : {Algorithm::kTaPid, Algorithm::kMystique}) {
      BidderParams p;
      p.algorithm = a;
      p.b0 = 1.0 + 100.0 * u(rng);
      p.tapid_kp = 30.0 * u(rng);
      p.tapid_ki = 10.0 * u(rng);
      p.tapid_kd = 0.1 * u(rng);
      p.mystique_alpha = 300.0 * u(rng);
      p.mystique_beta = u(rng);
      Bidder b(p);
      // Dyadic traffic marks summing to 1 and an integer budget keep every
      // on-pace balance exactly representable.
      const double budget = std::floor(10.0 + 1e6 * u(rng));
      constexpr std::int64_t kUnit = std::int64_t{1} << 20;
      std::vector<double> marks{0.0};
      std::int64_t at = 0;
      while (at < kUnit) {
        at = std::min(kUnit, at + 1024 + static_cast<std::int64_t>(rng() % 10240));
        marks.push_back(static_cast<double>(at) / static_cast<double>(kUnit));
      }
      const double all = 1.0;
      double prev_delta = NAN;
      for (std::size_t n = 0; n + 1 < marks.size(); ++n) {
        const double prev = marks[n];
        b.next_bid(observe(budget, budget * (1.0 - prev / all), prev, all, marks[n + 1] - prev));
        const double d = b.state().delta();
        if (n > 0) worst_drift = std::max(worst_drift, std::fabs(d - prev_delta));
        prev_delta = d;
      }
    }

    BidderParams alm;
    alm.algorithm = Algorithm::kAlm;
    alm.alm_beta = 100.0 * u(rng);
    alm.alm_clip_hi = 0.1 + 3.9 * u(rng);
    alm.alm_clip_lo = -alm.alm_clip_hi;
    Bidder b(alm);
    t = 0.0;
    double prev_delta = NAN;
    for (int n = 0; n < 10000; ++n) {
      const double inc = 1e-4 * u(rng);
      b.next_bid(observe(100, 100 * u(rng), t, 1.0, inc));
      t += inc;
      const double d = b.state().delta();
      if (n > 0) {
        const double step = std::fabs(d - prev_delta);
        worst_alm = std::max(worst_alm, step / alm.alm_clip_hi);
        if (step > alm.alm_clip_hi + 1e-12) o.fail("ALM step beyond clip at seed " + std::to_string(seed));
      }
      prev_delta = d;
    }
  }
  o.require(worst_drift < 1e-12, "on-pace drift " + std::to_string(worst_drift));
  o.detail << "max on-pace |d delta| " << worst_drift << ", max ALM step / clip " << worst_alm;
}

void oracle_dominance(Outcome& o) {
  double worst = -1e300;
  std::size_t runs = 0;
  for (AuctionType type : {AuctionType::kVcg, AuctionType::kFp}) {
    const Dataset d = synthetic(type, 200, 99);
    SimulationConfig sim = sim_for(d, kScale);
    sim.jobs = jobs();
    sim.keep_trajectories = false;
    std::map<std::string, double> bound;
    for (const auto& c : d.campaigns()) {
      const auto* stats = d.campaign_stats(c.campaign_id);
      const double b0 = static_cast<double>(c.auction_budget.minor()) / kScale;
      bound[c.campaign_id] =
          stats ? hindsight_oracle(c, *stats, b0, std::numeric_limits<double>::infinity(), type, d.gamma()) : 0.0;
    }
    for (Algorithm a : all_algorithms()) {
      BidderParams p;
      p.algorithm = a;
      const auto r = run_experiment(d, make_bidder_factory(p, CpcPolicy::parse("category-div-10"), d, kScale), sim);
      for (const auto& c : r.campaigns) {
        const double excess = c.clicks - bound[c.campaign_id];
        worst = std::max(worst, excess);
        ++runs;
        o.require(excess <= 1e-6, std::string(to_string(a)) + " beats the oracle on " + c.campaign_id);
      }
    }
  }

  std::mt19937_64 rng(5);
  double worst_gap = 0.0;
  for (int k = 0; k < 300; ++k) {
    const bool fp = k % 2 == 1;
    std::vector<std::vector<ToyRow>> periods;
    CampaignStats stats;
    const int np = 1 + static_cast<int>(rng() % 3);
    for (int p = 0; p < np; ++p) {
      periods.push_back(rtbtest::random_rows(rng, 3, 0, 8));
      stats[p * kHour] = rtbtest::to_slice(periods.back());
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto items = rtbtest::lp_items(periods, fp, kDefaultGamma);
    double total = 0.0;
    for (const auto& it : items) total += it.cost;
    const double budget = total * u(rng);
    const Campaign c = rtbtest::make_campaign("x", 0, np * kHour, 1);
    const double got = hindsight_oracle(c, stats, budget, std::numeric_limits<double>::infinity(),
                                        fp ? AuctionType::kFp : AuctionType::kVcg, kDefaultGamma);
    const double want = rtbtest::lp_enumerate(items, budget, std::numeric_limits<double>::infinity());
    const double gap = std::fabs(got - want) / std::max(1.0, std::fabs(want));
    worst_gap = std::max(worst_gap, gap);
    o.require(gap <= 1e-12, "greedy != enumeration on instance " + std::to_string(k));
  }
  o.detail << runs << " campaign runs, max clicks - oracle " << worst << "; 300 small instances, max rel gap "
           << worst_gap;
}

void metric_oracles(Outcome& o) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t defined = 0, undefined = 0;
  for (int k = 0; k < 50; ++k) {
    const AuctionType type = k % 2 ? AuctionType::kFp : AuctionType::kVcg;
    const Dataset d = synthetic(type, 1, 1000 + static_cast<std::uint64_t>(k));
    const Campaign& c = d.campaigns().front();
    BidderParams p;
    p.algorithm = all_algorithms()[static_cast<std::size_t>(k) % all_algorithms().size()];
    p.b0 = std::pow(kDefaultGamma, 60.0 * u(rng));
    if (k % 5 == 4) {
      // A bid below every bin: no clicks at all.
      p.algorithm = Algorithm::kTaPid;
      p.tapid_kp = 0.0;
      p.b0 = 0.5;
    }
    p.tapid_kp = p.tapid_kp * 3.0 * u(rng);
    p.mystique_alpha *= u(rng);
    const auto sim = sim_for(d, kScale);
    const auto r = run_experiment(d, make_bidder_factory(p, CpcPolicy::parse("category-div-10"), d, kScale), sim);
    const auto& res = r.campaigns.front();
    const auto* prof = d.profile(c.region_id);

    const double want_rmse = rtbtest::oracle_rmse(*res.trajectory, c, prof->shares(), kScale);
    o.require(rtbtest::rel_close(res.rmse_t, want_rmse, 1e-9), "rmse_t on trajectory " + std::to_string(k));
    o.require(rtbtest::rel_close(
                  rmse_t(*res.trajectory, c, *prof, d.epoch_offset(), kScale, kHour), want_rmse, 1e-9),
              "rmse_t direct on trajectory " + std::to_string(k));
    o.require(rtbtest::rel_close(scr(r), rtbtest::oracle_scr(r), 1e-9), "scr on trajectory " + std::to_string(k));

    const double cap = 0.01 + 100.0 * u(rng);
    const auto got = rel_cpc(r, cap);
    const auto want = rtbtest::oracle_rel_cpc(r, cap);
    o.require(got.has_value() == want.has_value(), "undefined marker mismatch on " + std::to_string(k));
    o.require(got.has_value() == (rtbtest::oracle_scr(r) > 0.0), "marker not tied to clicks on " + std::to_string(k));
    if (got && want) {
      o.require(rtbtest::rel_close(*got, *want, 1e-9), "rel_cpc on trajectory " + std::to_string(k));
      ++defined;
    } else {
      const auto j = make_report(r, "pacing", cap).to_json();
      o.require(j["rel_cpc"] == "undefined", "report lacks the undefined marker");
      ++undefined;
    }
  }
  o.require(undefined > 0 && defined > 0, "both branches must be exercised");
  o.detail << "50 trajectories, " << defined << " with clicks, " << undefined << " without";
}

// ---------------------------------------------------------------------------

std::pair<double, double> s2_rel_cpc(const BidderParams& p, const Dataset& s2, const EvalSetup& setup) {
  const BidderFactory f = make_bidder_factory(p, setup.cpc, s2, setup.sim.money_scale);
  const auto r = run_experiment(s2, f, setup.sim);
  std::vector<double> caps;
  for (const auto& c : r.campaigns) caps.push_back(*f(*s2.find_campaign(c.campaign_id)).cpc_limit);
  const auto v = rel_cpc(r, caps);
  return {v ? *v : NAN, scr(r)};
}

void tight_cpc(Outcome& o) {
  const Dataset d = synthetic(AuctionType::kFp, 160, 7);
  const auto split = split_time_disjoint(d);
  const Dataset s1 = d.restrict_to(split.train);
  const Dataset s2 = d.restrict_to(split.validation);

  EvalSetup setup;
  setup.sim = sim_for(d, kScale);
  setup.sim.keep_trajectories = false;
  setup.cpc = CpcPolicy::parse("category-div-10");
  setup.metric = TuneMetric::kRelCpc;

  std::map<Algorithm, std::pair<double, double>> rel;
  for (Algorithm a : {Algorithm::kMPid, Algorithm::kBroi}) {
    BidderParams base;
    base.algorithm = a;
    SearchSpace space;
    space.dims = default_search_dims(a);
    space.trials = 80;
    space.seed = 1;
    const auto best = search(space, base, [&](const BidderParams& p) { return evaluate(p, s1, setup); }, jobs());
    rel[a] = s2_rel_cpc(best.best, s2, setup);
  }
  BidderParams tapid;
  tapid.algorithm = Algorithm::kTaPid;
  rel[Algorithm::kTaPid] = s2_rel_cpc(tapid, s2, setup);

  o.require(rel[Algorithm::kMPid].first < 1.0, "tuned M-PID REL_CPC not below 1");
  o.require(rel[Algorithm::kBroi].first < 1.0, "tuned BROI REL_CPC not below 1");
  o.require(rel[Algorithm::kTaPid].first > 1.0, "TA-PID REL_CPC not above 1");
  o.detail << "S1 " << split.train.size() << " / S2 " << split.validation.size() << " campaigns; S2 REL_CPC (clicks)";
  for (Algorithm a : {Algorithm::kMPid, Algorithm::kBroi, Algorithm::kTaPid}) {
    o.detail << " " << to_string(a) << " " << rel[a].first << " (" << rel[a].second << ")";
  }
}

void tuning_audit(Outcome& o) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<Timestamp> start(0, 40), len(1, 12);
  int splits = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<Campaign> cs;
    const int n = 2 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      const Timestamp s = start(rng) * kDay;
      cs.push_back(rtbtest::make_campaign("c" + std::to_string(i), s, s + len(rng) * kDay, 100));
    }
    TimeSplit sp;
    try {
      sp = split_time_disjoint(cs);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++splits;
    std::map<std::string, const Campaign*> by_id;
    for (const auto& c : cs) by_id[c.campaign_id] = &c;
    Timestamp max_end = std::numeric_limits<Timestamp>::min(), min_start = std::numeric_limits<Timestamp>::max();
    std::set<std::string> seen;
    for (const auto& id : sp.train) max_end = std::max(max_end, by_id.at(id)->campaign_end), seen.insert(id);
    for (const auto& id : sp.validation) {
      min_start = std::min(min_start, by_id.at(id)->campaign_start);
      o.require(seen.insert(id).second, "campaign in both sets");
    }
    for (const auto& id : sp.dropped) o.require(seen.insert(id).second, "dropped campaign also assigned");
    o.require(seen.size() == cs.size(), "split loses campaigns");
    o.require(max_end <= sp.cut && sp.cut <= min_start, "S1 and S2 overlap in time");
  }
  o.require(splits >= 50, "too few feasible sets");

  SearchSpace s;
  s.dims = {ParamDim::parse("alm.beta", "0:1")};
  s.trials = 200;
  s.seed = 2024;
  const auto r = search(s, BidderParams{}, [](const BidderParams& p) { return -std::fabs(p.alm_beta - 0.3); });
  const double err = std::fabs(r.best.alm_beta - 0.3);
  o.require(err <= 0.05, "1-D optimum missed");
  o.detail << splits << " feasible splits of 100 sets; 1-D search error " << err;
}

void calibration(Outcome& o) {
  double worst = 0.0, lo = 1e300, hi = 0.0;
  for (AuctionType t : {AuctionType::kVcg, AuctionType::kFp}) {
    auto cfg = SynthConfig::defaults(t);
    cfg.n_campaigns = 10000;
    cfg.seed = 31;
    std::array<double, 5> dur{}, bud{};
    for (const auto& c : generate_campaigns(cfg)) {
      dur[static_cast<std::size_t>(duration_class(c.duration()))] += 1e-4;
      bud[static_cast<std::size_t>(
          budget_band(static_cast<double>(c.auction_budget.minor()) / cfg.minor_per_currency()))] += 1e-4;
    }
    for (std::size_t k = 0; k < 4; ++k) {
      worst = std::max({worst, std::fabs(dur[k] - cfg.duration_weights[k]), std::fabs(bud[k] - cfg.budget_weights[k])});
    }
    o.require(dur[4] == 0.0 && bud[4] == 0.0, "campaigns outside every class");
    for (const auto& p : generate_traffic(cfg)) {
      const auto& sh = p.shares();
      const double ratio = *std::max_element(sh.begin(), sh.end()) / *std::min_element(sh.begin(), sh.end());
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  o.require(worst <= 0.02, "mix off by more than 2%");
  o.require(lo >= 25.0 && hi <= 35.0, "traffic ratio outside [25, 35]");
  o.detail << "max mix deviation " << worst << ", traffic max/min in [" << lo << ", " << hi << "]";
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "rtbbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rtbbench_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void determinism(Outcome& o) {
  const fs::path data = scratch("det_data");
  o.require(cli_run({"synth", "--auction", "both", "--campaigns", "60", "--seed", "9", "--out", data.string()}).code ==
                0,
            "synth failed");
  std::vector<std::string> files;
  for (const std::string exp : {"pacing", "cpc"}) {
    std::vector<std::string> outs;
    for (const std::string j : {"1", "1", "8"}) {
      const fs::path out = scratch("det_" + exp + "_" + std::to_string(outs.size()));
      const auto r = cli_run({"experiment", "--dataset-dir", data.string(), "--auction", "both", "--experiment", exp,
                              "--seed", "4", "--jobs", j, "--out", out.string()});
      o.require(r.code == 0, exp + " run failed: " + r.err);
      std::string all;
      for (const auto& f : {exp + "_table.csv", exp + "_metrics.csv", exp + "_report.json"}) all += slurp(out / f);
      outs.push_back(all);
    }
    o.require(!outs[0].empty() && outs[0] == outs[1], exp + " reruns differ");
    o.require(outs[0] == outs[2], exp + " depends on --jobs");
    files.push_back(exp);
  }
  o.detail << "pacing and cpc reports byte-identical over reruns and --jobs 1/8";
}

void real_data(Outcome& o) {
  const char* env = std::getenv("RTB_DATASET_DIR");
  fs::path data;
  if (env && *env) {
    data = env;
    o.detail << "dataset " << data.string() << "; ";
  } else {
    data = scratch("standin");
    o.require(cli_run({"synth", "--campaigns", "40", "--seed", "10", "--out", data.string()}).code == 0,
              "synth failed");
    o.detail << "RTB_DATASET_DIR unset, synthetic stand-in; ";
  }
  const auto v = cli_run({"validate", "--dataset-dir", data.string()});
  o.require(v.code == 0, "validate failed:\n" + v.out + v.err);
  const fs::path out = scratch("real_out");
  const auto e = cli_run({"experiment", "--dataset-dir", data.string(), "--experiment", "pacing", "--jobs",
                          std::to_string(jobs()), "--out", out.string()});
  o.require(e.code == 0, "pacing failed: " + e.err);
  const std::string table = slurp(out / "pacing_table.csv");
  o.require(table.rfind("algorithm,VCG RMSE_T,VCG RMSE_T/B0,VCG SCR\n", 0) == 0, "unexpected table header");
  o.detail << "pacing table:\n" << table;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"conservation", conservation},   {"pricing oracle", pricing},  {"controller fixpoints", fixpoints},
      {"oracle dominance", oracle_dominance}, {"metric oracles", metric_oracles}, {"tight CPC", tight_cpc},
      {"tuning protocol", tuning_audit}, {"synthetic calibration", calibration}, {"determinism", determinism},
      {"real-data hook", real_data},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail.str() << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
