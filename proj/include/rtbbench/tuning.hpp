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
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "rtbbench/bidders.hpp"
#include "rtbbench/config.hpp"
#include "rtbbench/data_model.hpp"
#include "rtbbench/random.hpp"
#include "rtbbench/simulation.hpp"

namespace rtbbench {

struct TimeSplit {
  Timestamp cut = 0;
  std::vector<std::string> train;       // S1: campaign_end <= cut
  std::vector<std::string> validation;  // S2: campaign_start >= cut
  std::vector<std::string> dropped;     // straddle the cut
};

// Picks the cut among all campaign start/end instants that maximizes
// min(|S1|, |S2|); ties go to fewer dropped campaigns, then the earlier cut.
// Throws std::invalid_argument with fewer than 2 campaigns or when no cut
// gives two nonempty sets.
TimeSplit split_time_disjoint(const std::vector<Campaign>& campaigns);
TimeSplit split_time_disjoint(const Dataset& d);

struct ParamDim {
  enum class Kind { kUniform, kLogUniform, kChoice };

  std::string key;  // a BidderParams key
  Kind kind = Kind::kUniform;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> choices;

  // "lo:hi", "log:lo:hi" or "{a,b,c}".
  static ParamDim parse(const std::string& key, const std::string& text);
  bool contains(double v) const;
};

struct SearchSpace {
  std::vector<ParamDim> dims;
  int trials = 200;
  std::uint64_t seed = 0;
  // Fraction of the trial budget spent sampling around the incumbent.
  double refine_fraction = 0.0;

  // Throws std::invalid_argument on lo >= hi, empty choices, trials < 1,
  // refine_fraction outside [0, 1) or an unknown key.
  void validate() const;
  // True when every dimension is a single choice (or there are none).
  bool is_single_point() const;
  // Reads "search.<key>" entries plus search.trials / search.seed /
  // search.refine.
  static SearchSpace from_config(const Config& cfg);
  // Drops dimensions whose key does not apply to `a`.
  SearchSpace restricted_to(Algorithm a) const;
};

// Ranges searched when the configuration names none: b0 plus the
// algorithm's gains.
std::vector<ParamDim> default_search_dims(Algorithm a);

struct Trial {
  int index = 0;
  std::vector<double> values;  // in SearchSpace::dims order
  double score = 0.0;
};

struct SearchResult {
  BidderParams best;
  double best_score = 0.0;
  int best_trial = 0;
  std::vector<Trial> trials;

  // trial,<keys...>,score
  void write_csv(std::ostream& out, const SearchSpace& space) const;
};

// Larger is better. Must be deterministic given params.
using Objective = std::function<double(const BidderParams&)>;

// Seeded random search. Trials may run on `jobs` threads; the log is kept in
// trial order and does not depend on jobs. A single-point space is evaluated
// once.
SearchResult search(const SearchSpace& space, const BidderParams& base, const Objective& objective, int jobs = 1);

enum class TuneMetric {
  kScr,     // total clicks
  kRmseT,   // minus mean B0-normalized RMSE_T
  kRelCpc,  // minus REL_CPC; no clicks ranks last
  kCpcScr,  // clicks when REL_CPC <= 1, otherwise minus REL_CPC
};

TuneMetric parse_tune_metric(const std::string& s);
std::string to_string(TuneMetric m);

struct EvalSetup {
  SimulationConfig sim;
  CpcPolicy cpc;
  TuneMetric metric = TuneMetric::kScr;
};

// Runs params on every campaign of `d` and scores the result. Throws
// std::invalid_argument when d has no campaigns.
double evaluate(const BidderParams& params, const Dataset& d, const EvalSetup& setup);

}  // namespace rtbbench
