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

#include <stdexcept>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "rtbbench/kernels.hpp"

namespace k = rtbbench::kernels;

namespace {

std::vector<k::Isa> compiled_variants() {
  std::vector<k::Isa> v{k::Isa::kScalar};
  for (k::Isa isa : {k::Isa::kAvx2, k::Isa::kNeon}) {
    if (k::available(isa)) v.push_back(isa);
  }
  return v;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

}  // namespace

TEST_CASE("scalar kernels on hand values") {
  const auto& t = k::table(k::Isa::kScalar);
  const std::vector<std::int32_t> bins{1, 2, 3};
  const std::vector<double> v{2.0, 3.0, 5.0};
  CHECK(t.masked_sum_le(bins.data(), v.data(), 3, 2) == 5.0);
  CHECK(t.masked_sum_le(bins.data(), v.data(), 3, 0) == 0.0);
  CHECK(t.masked_sum_le(bins.data(), v.data(), 3, 9) == 10.0);
  CHECK(t.sum(v.data(), 3) == 10.0);
  const std::vector<double> a{3.0, 4.0}, b{0.0, 0.0};
  CHECK(t.sum_squared_diff(a.data(), b.data(), 2) == 25.0);
}

TEST_CASE("every compiled variant matches the scalar reference") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::uniform_int_distribution<int> bin(-5, 70);
  const auto& ref = k::table(k::Isa::kScalar);
  for (k::Isa isa : compiled_variants()) {
    CAPTURE(k::to_string(isa));
    const auto& t = k::table(isa);
    // Lengths cover empty, sub-vector, exact multiples and ragged tails.
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 200}) {
      std::vector<std::int32_t> bins(n);
      std::vector<double> c(n), ct(n), vis(n), wb(n);
      for (std::size_t i = 0; i < n; ++i) {
        bins[i] = bin(rng);
        c[i] = val(rng);
        ct[i] = val(rng);
        vis[i] = val(rng);
        wb[i] = val(rng);
      }
      for (int limit : {-10, -5, 0, 33, 70, 100}) {
        CHECK(close(t.masked_sum_le(bins.data(), c.data(), n, limit), ref.masked_sum_le(bins.data(), c.data(), n, limit)));
        const k::SliceColumns cols{bins, c, ct, vis, wb};
        const auto a = t.outcome_sums_le(cols, limit);
        const auto b = ref.outcome_sums_le(cols, limit);
        CHECK(close(a.clicks, b.clicks));
        CHECK(close(a.contacts, b.contacts));
        CHECK(close(a.visibility, b.visibility));
        CHECK(close(a.win_bid, b.win_bid));
        CHECK(a.rows == b.rows);
      }
      CHECK(close(t.sum(c.data(), n), ref.sum(c.data(), n)));
      CHECK(close(t.sum_squared_diff(c.data(), ct.data(), n), ref.sum_squared_diff(c.data(), ct.data(), n)));
    }
  }
}

TEST_CASE("dispatch can be pinned and reset") {
  k::force(k::Isa::kScalar);
  CHECK(k::active() == k::Isa::kScalar);
  const std::vector<double> v{1.0, 2.0};
  CHECK(k::sum(v) == 3.0);
  k::reset();
  CHECK(k::available(k::active()));
  if (!k::available(k::Isa::kNeon)) CHECK_THROWS_AS(k::force(k::Isa::kNeon), std::invalid_argument);
}
