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

#include <immintrin.h>

#include "rtbbench/kernels.hpp"

namespace rtbbench::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Widens four int32 bins to a 64-bit lane mask of (bin <= limit).
inline __m256d le_mask(const std::int32_t* bins, __m128i limit) {
  __m128i b = _mm_loadu_si128(reinterpret_cast<const __m128i*>(bins));
  __m128i gt = _mm_cmpgt_epi32(b, limit);
  __m256i wide = _mm256_cvtepi32_epi64(gt);
  return _mm256_castsi256_pd(_mm256_xor_si256(wide, _mm256_set1_epi64x(-1)));
}

double sum_avx2(const double* v, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += v[i];
  return s;
}

double masked_sum_le_avx2(const std::int32_t* bins, const double* v, std::size_t n, std::int32_t limit) {
  const __m128i lim = _mm_set1_epi32(limit);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = le_mask(bins + i, lim);
    acc = _mm256_add_pd(acc, _mm256_and_pd(m, _mm256_loadu_pd(v + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    if (bins[i] <= limit) s += v[i];
  }
  return s;
}

OutcomeSums outcome_sums_le_avx2(const SliceColumns& c, std::int32_t limit) {
  const __m128i lim = _mm_set1_epi32(limit);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d clicks = _mm256_setzero_pd(), contacts = _mm256_setzero_pd(), vis = _mm256_setzero_pd(),
          win = _mm256_setzero_pd(), rows = _mm256_setzero_pd();
  const std::size_t n = c.bins.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d m = le_mask(c.bins.data() + i, lim);
    clicks = _mm256_add_pd(clicks, _mm256_and_pd(m, _mm256_loadu_pd(c.clicks.data() + i)));
    contacts = _mm256_add_pd(contacts, _mm256_and_pd(m, _mm256_loadu_pd(c.contacts.data() + i)));
    vis = _mm256_add_pd(vis, _mm256_and_pd(m, _mm256_loadu_pd(c.visibility.data() + i)));
    win = _mm256_add_pd(win, _mm256_and_pd(m, _mm256_loadu_pd(c.win_bid.data() + i)));
    rows = _mm256_add_pd(rows, _mm256_and_pd(m, one));
  }
  OutcomeSums out{hsum(clicks), hsum(contacts), hsum(vis), hsum(win), hsum(rows)};
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

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{sum_avx2, masked_sum_le_avx2, outcome_sums_le_avx2, sum_squared_diff_avx2};
  return t;
}

}  // namespace rtbbench::kernels::detail
