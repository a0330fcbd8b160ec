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

#include "rtbbench/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "rtbbench/csv.hpp"
#include "rtbbench/data_model.hpp"
#include "rtbbench/metrics.hpp"
#include "rtbbench/synthgen.hpp"
#include "rtbbench/tuning.hpp"

namespace rtbbench::cli {

namespace fs = std::filesystem;

Experiment parse_experiment(const std::string& s) {
  if (s == "pacing") return Experiment::kPacing;
  if (s == "cpc") return Experiment::kCpc;
  if (s == "clicks") return Experiment::kClicks;
  if (s == "duration-split") return Experiment::kDurationSplit;
  throw std::invalid_argument("unknown experiment: " + s);
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kPacing:
      return "pacing";
    case Experiment::kCpc:
      return "cpc";
    case Experiment::kClicks:
      return "clicks";
    case Experiment::kDurationSplit:
      return "duration-split";
  }
  return "pacing";
}

std::vector<Algorithm> default_algorithms(Experiment e) {
  switch (e) {
    case Experiment::kPacing:
      return {Algorithm::kAlm, Algorithm::kTaPid, Algorithm::kMPid, Algorithm::kMystique};
    case Experiment::kCpc:
      return {Algorithm::kMPid, Algorithm::kBroi};
    case Experiment::kClicks:
    case Experiment::kDurationSplit:
      return all_algorithms();
  }
  return all_algorithms();
}

namespace {

CpcPolicy default_policy(Experiment e) {
  return e == Experiment::kCpc ? CpcPolicy::parse("category-div-10") : CpcPolicy::parse("budget");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig RunConfig::from_config(const Config& settings) {
  RunConfig r;
  r.settings = settings;
  r.dataset_dir = settings.get_string("dataset_dir", "");
  const std::string auction = settings.get_string("auction", "vcg");
  if (auction == "both") {
    r.auctions = {AuctionType::kVcg, AuctionType::kFp};
    r.split_auction_dirs = true;
  } else {
    r.auctions = {parse_auction_type(auction)};
  }
  r.experiment = parse_experiment(settings.get_string("experiment", "pacing"));
  if (auto algo = settings.get("algo")) {
    for (const auto& a : split_list(*algo)) r.algorithms.push_back(parse_algorithm(a));
  }
  if (r.algorithms.empty()) r.algorithms = default_algorithms(r.experiment);
  r.category_prefix = settings.get_string("category_prefix", "");
  if (auto cpc = settings.get("cpc")) r.cpc = CpcPolicy::parse(*cpc);
  r.seed_given = settings.has("seed");
  r.seed = static_cast<std::uint64_t>(settings.get_int("seed", 0));
  r.jobs = static_cast<int>(settings.get_int("jobs", 1));
  if (r.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  r.out = settings.get_string("out", "out");
  return r;
}

fs::path RunConfig::dataset_for(AuctionType t) const {
  if (!split_auction_dirs) return dataset_dir;
  return dataset_dir / std::string(to_string(t));
}

SimulationConfig RunConfig::simulation(AuctionType t, const Dataset& d) const {
  SimulationConfig sim = SimulationConfig::for_dataset(d);
  sim.auction_type = t;
  sim.step = settings.get_int("step", kHour);
  sim.money_scale = settings.get_double("money_scale", 1.0);
  sim.ctr_bin_halfwidth = static_cast<int>(settings.get_int("ctr_bin_halfwidth", 2));
  const std::string pricing = settings.get_string("fp_pricing", "cumulative");
  if (pricing == "cumulative") {
    sim.fp_pricing = FpPricing::kCumulative;
  } else if (pricing == "exact") {
    sim.fp_pricing = FpPricing::kExactBin;
  } else {
    throw std::invalid_argument("fp_pricing must be cumulative or exact");
  }
  sim.seed = seed;
  sim.jobs = jobs;
  sim.keep_trajectories = false;
  return sim;
}

BidderParams RunConfig::bidder_params(Algorithm a) const {
  BidderParams p;
  p.algorithm = a;
  settings.apply_bidder_params(p);
  p.validate();
  return p;
}

Config layered_config(const Config& flags) {
  Config merged;
  if (auto dir = flags.get("dataset_dir")) {
    fs::path base = *dir;
    if (flags.get_string("auction", "vcg") == "both") base /= "vcg";
    const fs::path local = base / kDatasetConfigName;
    if (fs::exists(local)) merged.merge(Config::load(local));
  }
  if (auto file = flags.get("config")) merged.merge(Config::load(*file));
  merged.merge(flags);
  return merged;
}

namespace {

Dataset load(const RunConfig& cfg, AuctionType t) {
  return load_dataset(DatasetPaths::in_directory(cfg.dataset_for(t)), t,
                      cfg.settings.get_double("gamma", kDefaultGamma), cfg.settings.get_int("epoch_offset", 0));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string at_label(AuctionType t) { return t == AuctionType::kVcg ? "VCG" : "FP"; }

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  bool ok = true;
  nlohmann::json all;
  for (AuctionType t : cfg.auctions) {
    Dataset d;
    try {
      d = load(cfg, t);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
    const ValidationReport report = validate_dataset(d);
    out << at_label(t) << " " << cfg.dataset_for(t).string() << ": " << d.campaigns().size() << " campaigns, "
        << d.record_count() << " stat records\n";
    for (const auto& c : report.checks) {
      out << "  " << (c.passed ? "PASS " : "FAIL ") << c.name;
      if (!c.passed) {
        out << " (" << c.offending.size() << "):";
        for (std::size_t i = 0; i < std::min<std::size_t>(c.offending.size(), 10); ++i) out << " " << c.offending[i];
        if (c.offending.size() > 10) out << " ...";
      }
      out << "\n";
    }
    ok = ok && report.ok();
    all[std::string(to_string(t))] = report.to_json();
  }
  if (cfg.settings.has("out")) {
    fs::create_directories(cfg.out);
    write_text(cfg.out / "validation.json", all.dump(2) + "\n");
  }
  return ok ? kOk : kFailed;
}

int cmd_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string exp = to_string(cfg.experiment);
  std::vector<MetricReport> reports;
  nlohmann::json detail;
  detail["experiment"] = exp;
  detail["category_prefix"] = cfg.category_prefix;
  detail["runs"] = nlohmann::json::array();

  for (AuctionType t : cfg.auctions) {
    Dataset d;
    try {
      d = load(cfg, t);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
    const SimulationConfig sim = cfg.simulation(t, d);
    const CpcPolicy policy = cfg.cpc.value_or(default_policy(cfg.experiment));

    std::vector<std::pair<std::string, CampaignFilter>> parts;
    CampaignFilter base;
    base.category_prefix = cfg.category_prefix;
    if (cfg.experiment == Experiment::kDurationSplit) {
      CampaignFilter shorter = base;
      shorter.duration = DurationClass::kUpToOneDay;
      CampaignFilter longer = base;
      longer.duration = DurationClass::kOverOneDay;
      parts = {{exp + ":le1d", shorter}, {exp + ":gt1d", longer}};
    } else {
      parts = {{exp, base}};
    }
    bool any = false;
    for (const auto& [tag, f] : parts) {
      any = any || std::any_of(d.campaigns().begin(), d.campaigns().end(),
                               [&](const Campaign& c) { return f.matches(c); });
    }
    if (!any) {
      err << "error: no campaigns match category prefix '" << cfg.category_prefix << "'\n";
      return kFailed;
    }

    if (policy.kind == CpcPolicy::Kind::kCategoryDiv10) {
      nlohmann::json means;
      for (const auto& c : d.campaigns()) {
        if (!base.matches(c) || means.contains(c.logical_category)) continue;
        means[c.logical_category] = category_mean_cpc(d, c.logical_category);
      }
      detail["category_mean_cpc"][std::string(to_string(t))] = means;
    }

    for (Algorithm a : cfg.algorithms) {
      const BidderParams params = cfg.bidder_params(a);
      const BidderFactory factory = make_bidder_factory(params, policy, d, sim.money_scale);
      for (const auto& [tag, f] : parts) {
        MetricReport rep;
        ExperimentResult res;
        res.auction_type = t;
        res.money_scale = sim.money_scale;
        const bool selected = std::any_of(d.campaigns().begin(), d.campaigns().end(),
                                          [&, &f = f](const Campaign& c) { return f.matches(c); });
        if (selected) res = run_experiment(d, factory, sim, f);
        res.algorithm = std::string(to_string(a));
        rep = make_report(res, tag);
        if (cfg.experiment == Experiment::kCpc) {
          std::vector<double> caps;
          for (const auto& c : res.campaigns) {
            const BidderParams p = factory(*d.find_campaign(c.campaign_id));
            caps.push_back(p.cpc_limit.value_or(static_cast<double>(c.budget.minor()) / sim.money_scale));
          }
          rep.cpc_scored = true;
          if (!caps.empty()) {
            rep.rel_cpc = rel_cpc(res, caps);
            if (std::all_of(caps.begin(), caps.end(), [&](double x) { return x == caps.front(); })) {
              rep.cpc_limit = caps.front();
            }
          }
        }
        nlohmann::json run = res.to_json();
        run["experiment"] = tag;
        run["cpc_policy"] = policy.to_string();
        run["metrics"] = rep.to_json();
        detail["runs"].push_back(std::move(run));
        reports.push_back(std::move(rep));
      }
    }
  }

  // Table: one row per algorithm, metric columns per auction type.
  std::vector<std::string> header{"algorithm"};
  std::vector<std::string> tags;
  for (const auto& r : reports) {
    if (std::find(tags.begin(), tags.end(), r.experiment) == tags.end()) tags.push_back(r.experiment);
  }
  for (AuctionType t : cfg.auctions) {
    const std::string at = at_label(t);
    for (const auto& tag : tags) {
      const std::string suffix = tags.size() > 1 ? " " + tag.substr(tag.find(':') + 1) : "";
      switch (cfg.experiment) {
        case Experiment::kPacing:
          header.insert(header.end(), {at + " RMSE_T", at + " RMSE_T/B0", at + " SCR"});
          break;
        case Experiment::kCpc:
          header.insert(header.end(), {at + " REL_CPC", at + " SCR"});
          break;
        case Experiment::kClicks:
          header.push_back(at + " SCR");
          break;
        case Experiment::kDurationSplit:
          header.push_back(at + " SCR/day" + suffix);
          break;
      }
    }
  }
  std::ostringstream table;
  csv::write_row(table, header);
  for (Algorithm a : cfg.algorithms) {
    std::vector<std::string> row{std::string(to_string(a))};
    for (AuctionType t : cfg.auctions) {
      for (const auto& tag : tags) {
        const auto it = std::find_if(reports.begin(), reports.end(), [&](const MetricReport& r) {
          return r.algorithm == to_string(a) && r.auction_type == t && r.experiment == tag;
        });
        const MetricReport& r = *it;
        switch (cfg.experiment) {
          case Experiment::kPacing:
            row.insert(row.end(),
                       {csv::format_double(r.rmse_t), csv::format_double(r.rmse_t_norm), csv::format_double(r.scr)});
            break;
          case Experiment::kCpc:
            row.insert(row.end(), {r.rel_cpc ? csv::format_double(*r.rel_cpc) : std::string("undefined"),
                                   csv::format_double(r.scr)});
            break;
          case Experiment::kClicks:
            row.push_back(csv::format_double(r.scr));
            break;
          case Experiment::kDurationSplit:
            row.push_back(csv::format_double(r.scr_per_diem));
            break;
        }
      }
    }
    csv::write_row(table, row);
  }

  std::ostringstream flat;
  csv::write_row(flat, MetricReport::csv_header());
  for (const auto& r : reports) csv::write_row(flat, r.csv_row());

  fs::create_directories(cfg.out);
  write_text(cfg.out / (exp + "_table.csv"), table.str());
  write_text(cfg.out / (exp + "_metrics.csv"), flat.str());
  write_text(cfg.out / (exp + "_report.json"), detail.dump(2) + "\n");
  out << table.str();
  return kOk;
}

int cmd_tune(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  SearchSpace space = SearchSpace::from_config(cfg.settings);
  if (cfg.seed_given) space.seed = cfg.seed;
  TuneMetric metric;
  if (auto m = cfg.settings.get("tune.metric")) {
    metric = parse_tune_metric(*m);
  } else if (cfg.experiment == Experiment::kPacing) {
    metric = TuneMetric::kRmseT;
  } else if (cfg.experiment == Experiment::kCpc) {
    metric = TuneMetric::kRelCpc;
  } else {
    metric = TuneMetric::kScr;
  }

  fs::create_directories(cfg.out);
  for (AuctionType t : cfg.auctions) {
    Dataset d;
    try {
      d = load(cfg, t);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
    std::vector<Campaign> pool;
    CampaignFilter base;
    base.category_prefix = cfg.category_prefix;
    for (const auto& c : d.campaigns()) {
      if (base.matches(c)) pool.push_back(c);
    }
    TimeSplit split;
    try {
      split = split_time_disjoint(pool);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kFailed;
    }
    const Dataset train = d.restrict_to(split.train);
    const Dataset validation = d.restrict_to(split.validation);

    EvalSetup setup;
    setup.sim = cfg.simulation(t, d);
    setup.sim.jobs = 1;
    setup.cpc = cfg.cpc.value_or(default_policy(cfg.experiment));
    setup.metric = metric;

    for (Algorithm a : cfg.algorithms) {
      const BidderParams base_params = cfg.bidder_params(a);
      SearchSpace algo_space = space.restricted_to(a);
      if (space.dims.empty()) algo_space.dims = default_search_dims(a);
      const Objective objective = [&](const BidderParams& p) { return evaluate(p, train, setup); };
      const SearchResult result = search(algo_space, base_params, objective, cfg.jobs);
      const double validation_score = evaluate(result.best, validation, setup);

      const std::string stem = lower(to_string(t)) + "_" + lower(to_string(a));
      std::ostringstream trials;
      result.write_csv(trials, algo_space);
      write_text(cfg.out / (stem + "_trials.csv"), trials.str());

      std::ostringstream best;
      best << "# " << to_string(a) << " tuned on " << split.train.size() << " campaigns\n";
      for (const auto& key : BidderParams::keys(a)) {
        best << key << " = " << csv::format_double(result.best.get(key)) << "\n";
      }
      write_text(cfg.out / (stem + "_best.conf"), best.str());

      nlohmann::json rep;
      rep["algorithm"] = std::string(to_string(a));
      rep["auction_type"] = std::string(to_string(t));
      rep["metric"] = to_string(metric);
      rep["split"] = {{"cut", split.cut},
                      {"train", split.train},
                      {"validation", split.validation},
                      {"dropped", split.dropped}};
      rep["trials"] = result.trials.size();
      rep["best_trial"] = result.best_trial;
      rep["train_score"] = result.best_score;
      rep["validation_score"] = validation_score;
      write_text(cfg.out / (stem + "_tune.json"), rep.dump(2) + "\n");
      out << to_string(t) << " " << to_string(a) << ": train " << csv::format_double(result.best_score)
          << ", validation " << csv::format_double(validation_score) << " (" << to_string(metric) << ", "
          << result.trials.size() << " trials)\n";
    }
  }
  return kOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const Config& s = cfg.settings;
  for (AuctionType t : cfg.auctions) {
    SynthConfig sc = SynthConfig::defaults(t);
    sc.seed = cfg.seed;
    sc.n_campaigns = static_cast<std::size_t>(s.get_int("synth.n_campaigns", static_cast<long long>(sc.n_campaigns)));
    sc.n_regions = static_cast<int>(s.get_int("synth.n_regions", sc.n_regions));
    sc.horizon_days = static_cast<int>(s.get_int("synth.horizon_days", sc.horizon_days));
    sc.noise_sigma = s.get_double("synth.noise_sigma", sc.noise_sigma);
    sc.pressure_lo = s.get_double("synth.pressure_lo", sc.pressure_lo);
    sc.pressure_hi = s.get_double("synth.pressure_hi", sc.pressure_hi);
    sc.night_bin_drift = s.get_double("synth.night_bin_drift", sc.night_bin_drift);
    sc.peak_bin = s.get_double("synth.peak_bin", sc.peak_bin);
    sc.bid_unit = s.get_double("synth.bid_unit", sc.bid_unit);
    sc.money_scale = s.get_double("synth.money_scale", sc.money_scale);
    sc.gamma = s.get_double("gamma", sc.gamma);

    const fs::path dir = cfg.auctions.size() > 1 ? cfg.out / std::string(to_string(t)) : cfg.out;
    fs::create_directories(dir);
    const Dataset d = generate(sc);
    write_dataset(d, DatasetPaths::in_directory(dir));
    std::ostringstream conf;
    conf << "money_scale = " << csv::format_double(sc.money_scale) << "\n"
         << "gamma = " << csv::format_double(sc.gamma) << "\n";
    write_text(dir / kDatasetConfigName, conf.str());
    nlohmann::json summary = describe(d, sc.minor_per_currency());
    summary["path"] = dir.string();
    out << summary.dump(2) << "\n";
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replay benchmark for real-time-bidding autobidders"};
  app.require_subcommand(1);

  Config flags;
  std::vector<std::string> sets;
  auto add_common = [&](CLI::App* sub) {
    auto opt = [&](const std::string& name, const std::string& key, const std::string& help) {
      sub->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags.set(key, v); }, help);
    };
    opt("--dataset-dir", "dataset_dir", "Directory with campaigns.csv, auction_stats.csv, traffic.csv");
    opt("--auction", "auction", "vcg, fp or both");
    opt("--seed", "seed", "Random seed");
    opt("--jobs", "jobs", "Worker threads");
    opt("--out", "out", "Output directory");
    opt("--config", "config", "Flat key = value settings file");
    sub->add_option("--set", sets, "Extra key=value setting")->take_all();
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a dataset against the schema and invariants");
  CLI::App* experiment = app.add_subcommand("experiment", "Run an experiment and write report tables");
  CLI::App* tune = app.add_subcommand("tune", "Split by time, search parameters on S1, score on S2");
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  for (CLI::App* sub : {validate, experiment, tune, synth}) add_common(sub);
  for (CLI::App* sub : {experiment, tune}) {
    sub->add_option_function<std::string>("--algo", [&](const std::string& v) { flags.set("algo", v); },
                                          "Comma-separated algorithms");
    sub->add_option_function<std::string>(
        "--experiment", [&](const std::string& v) { flags.set("experiment", v); },
        "pacing, cpc, clicks or duration-split");
    sub->add_option_function<std::string>(
        "--category-prefix", [&](const std::string& v) { flags.set("category_prefix", v); }, "Category filter");
    sub->add_option_function<std::string>(
        "--cpc", [&](const std::string& v) { flags.set("cpc", v); }, "fixed:<v>, category-div-10 or budget");
  }
  synth->add_option_function<std::string>(
      "--campaigns", [&](const std::string& v) { flags.set("synth.n_campaigns", v); }, "Number of campaigns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value: " + kv);
      flags.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const RunConfig cfg = RunConfig::from_config(layered_config(flags));
    if (validate->parsed() || experiment->parsed() || tune->parsed()) {
      if (cfg.dataset_dir.empty()) {
        err << "error: --dataset-dir is required\n";
        return kInputError;
      }
    }
    if (validate->parsed()) return cmd_validate(cfg, out, err);
    if (experiment->parsed()) return cmd_experiment(cfg, out, err);
    if (tune->parsed()) return cmd_tune(cfg, out, err);
    return cmd_synth(cfg, out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
}

}  // namespace rtbbench::cli
