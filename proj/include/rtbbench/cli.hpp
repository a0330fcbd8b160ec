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
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rtbbench/bidders.hpp"
#include "rtbbench/config.hpp"
#include "rtbbench/simulation.hpp"

namespace rtbbench::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kInputError = 2;

// Name of the per-dataset settings file read before --config.
inline constexpr const char* kDatasetConfigName = "rtbbench.conf";

enum class Experiment { kPacing, kCpc, kClicks, kDurationSplit };

Experiment parse_experiment(const std::string& s);
std::string to_string(Experiment e);
// Algorithms an experiment runs when --algo is not given.
std::vector<Algorithm> default_algorithms(Experiment e);

struct RunConfig {
  std::filesystem::path dataset_dir;
  std::vector<AuctionType> auctions{AuctionType::kVcg};
  bool split_auction_dirs = false;  // --auction both: <dir>/vcg and <dir>/fp
  std::vector<Algorithm> algorithms;
  Experiment experiment = Experiment::kPacing;
  std::string category_prefix;
  std::optional<CpcPolicy> cpc;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  std::filesystem::path out = "out";
  Config settings;  // every key, after layering

  // Reads the well-known keys (dataset_dir, auction, algo, experiment,
  // category_prefix, cpc, seed, jobs, out). Throws std::invalid_argument on
  // bad values.
  static RunConfig from_config(const Config& settings);

  std::filesystem::path dataset_for(AuctionType t) const;
  SimulationConfig simulation(AuctionType t, const Dataset& d) const;
  BidderParams bidder_params(Algorithm a) const;
};

// Layers <dataset_dir>/rtbbench.conf (or <dataset_dir>/vcg/rtbbench.conf
// for --auction both), then the file named by the "config" key, then `flags`.
Config layered_config(const Config& flags);

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_experiment(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_tune(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv with CLI11 and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rtbbench::cli
