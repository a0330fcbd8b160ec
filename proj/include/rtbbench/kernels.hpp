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
#include <span>
#include <string_view>

// Inner-loop arithmetic over bin columns and residual vectors. Each kernel has
// a scalar reference and, where the target supports it, an AVX2 or NEON
// variant; the active set is picked once at startup from CPU features and can
// be pinned with RTBBENCH_KERNELS=scalar|avx2|neon.
namespace rtbbench::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

// Compiled in and supported by the running CPU.
bool available(Isa isa);
Isa active();
// Pins the kernel set; throws std::invalid_argument if unavailable.
void force(Isa isa);
// Returns to automatic selection.
void reset();

struct OutcomeSums {
  double clicks = 0.0;
  double contacts = 0.0;
  double visibility = 0.0;
  double win_bid = 0.0;
  double rows = 0.0;  // number of rows with bin <= limit
};

// Column views of one bin slice. Rows need not be sorted.
struct SliceColumns {
  std::span<const std::int32_t> bins;
  std::span<const double> clicks;
  std::span<const double> contacts;
  std::span<const double> visibility;
  std::span<const double> win_bid;
};

double sum(std::span<const double> v);
// Sum of v[i] over rows with bins[i] <= limit.
double masked_sum_le(std::span<const std::int32_t> bins, std::span<const double> v, std::int32_t limit);
OutcomeSums outcome_sums_le(const SliceColumns& s, std::int32_t limit);
// Sum of (a[i] - b[i])^2.
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

// Function table of one ISA. Exposed so equivalence tests can call a specific
// variant directly.
struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*masked_sum_le)(const std::int32_t*, const double*, std::size_t, std::int32_t);
  OutcomeSums (*outcome_sums_le)(const SliceColumns&, std::int32_t);
  double (*sum_squared_diff)(const double*, const double*, std::size_t);
};

const KernelTable& table(Isa isa);

namespace detail {
const KernelTable& scalar_table();
#if defined(RTBBENCH_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(RTBBENCH_HAVE_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace rtbbench::kernels
