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

#include "rtbbench/kernels.hpp"

namespace rtbbench::kernels::detail {

namespace {

double sum_scalar(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s;
}

double masked_sum_le_scalar(const std::int32_t* bins, const double* v, std::size_t n, std::int32_t limit) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bins[i] <= limit) s += v[i];
  }
  return s;
}

OutcomeSums outcome_sums_le_scalar(const SliceColumns& c, std::int32_t limit) {
  OutcomeSums out;
  const std::size_t n = c.bins.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (c.bins[i] > limit) continue;
    out.clicks += c.clicks[i];
    out.contacts += c.contacts[i];
    out.visibility += c.visibility[i];
    out.win_bid += c.win_bid[i];
    out.rows += 1.0;
  }
  return out;
}

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{sum_scalar, masked_sum_le_scalar, outcome_sums_le_scalar, sum_squared_diff_scalar};
  return t;
}

}  // namespace rtbbench::kernels::detail
