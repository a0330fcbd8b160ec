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

#include <arm_neon.h>

#include "rtbbench/kernels.hpp"

namespace rtbbench::kernels::detail {

namespace {

// Two-lane mask of (bin <= limit) for bins[0..1].
inline uint64x2_t le_mask(const std::int32_t* bins, std::int32_t limit) {
  int32x2_t b = vld1_s32(bins);
  uint32x2_t le = vcle_s32(b, vdup_n_s32(limit));
  return vreinterpretq_u64_s64(vmovl_s32(vreinterpret_s32_u32(le)));
}

inline float64x2_t masked(uint64x2_t m, float64x2_t v) {
  return vreinterpretq_f64_u64(vandq_u64(m, vreinterpretq_u64_f64(v)));
}

double sum_neon(const double* v, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(v + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(v + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += v[i];
  return s;
}

double masked_sum_le_neon(const std::int32_t* bins, const double* v, std::size_t n, std::int32_t limit) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, masked(le_mask(bins + i, limit), vld1q_f64(v + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    if (bins[i] <= limit) s += v[i];
  }
  return s;
}

OutcomeSums outcome_sums_le_neon(const SliceColumns& c, std::int32_t limit) {
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t clicks = vdupq_n_f64(0.0), contacts = clicks, vis = clicks, win = clicks, rows = clicks;
  const std::size_t n = c.bins.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t m = le_mask(c.bins.data() + i, limit);
    clicks = vaddq_f64(clicks, masked(m, vld1q_f64(c.clicks.data() + i)));
    contacts = vaddq_f64(contacts, masked(m, vld1q_f64(c.contacts.data() + i)));
    vis = vaddq_f64(vis, masked(m, vld1q_f64(c.visibility.data() + i)));
    win = vaddq_f64(win, masked(m, vld1q_f64(c.win_bid.data() + i)));
    rows = vaddq_f64(rows, masked(m, one));
  }
  OutcomeSums out{vaddvq_f64(clicks), vaddvq_f64(contacts), vaddvq_f64(vis), vaddvq_f64(win), vaddvq_f64(rows)};
  for (; i < n; ++i) {
    if (c.bins[i] > limit) continue;
    out.clicks += c.clicks[i];
    out.contacts += c.contacts[i];
    out.visibility += c.visibility[i];
    out.win_bid += c.win_bid[i];
    out.rows += 1.0;
  }
  return out;
}

double sum_squared_diff_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{sum_neon, masked_sum_le_neon, outcome_sums_le_neon, sum_squared_diff_neon};
  return t;
}

}  // namespace rtbbench::kernels::detail
