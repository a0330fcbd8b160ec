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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "rtbbench/kernels.hpp"

namespace rtbbench::kernels {

namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(RTBBENCH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(RTBBENCH_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (const char* env = std::getenv("RTBBENCH_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && cpu_supports(Isa::kAvx2)) return Isa::kAvx2;
    if (v == "neon" && cpu_supports(Isa::kNeon)) return Isa::kNeon;
  }
  if (cpu_supports(Isa::kAvx2)) return Isa::kAvx2;
  if (cpu_supports(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{&table(detect())};
  return t;
}

std::atomic<Isa>& current_isa() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool available(Isa isa) { return cpu_supports(isa); }

const KernelTable& table(Isa isa) {
  switch (isa) {
#if defined(RTBBENCH_HAVE_AVX2)
    case Isa::kAvx2:
      if (cpu_supports(isa)) return detail::avx2_table();
      break;
#endif
#if defined(RTBBENCH_HAVE_NEON)
    case Isa::kNeon:
      return detail::neon_table();
#endif
    default:
      break;
  }
  if (isa != Isa::kScalar) throw std::invalid_argument("kernel set not available: " + std::string(to_string(isa)));
  return detail::scalar_table();
}

Isa active() { return current_isa().load(std::memory_order_relaxed); }

void force(Isa isa) {
  const KernelTable& t = table(isa);
  current().store(&t, std::memory_order_relaxed);
  current_isa().store(isa, std::memory_order_relaxed);
}

void reset() { force(detect()); }

double sum(std::span<const double> v) { return current().load(std::memory_order_relaxed)->sum(v.data(), v.size()); }

double masked_sum_le(std::span<const std::int32_t> bins, std::span<const double> v, std::int32_t limit) {
  return current().load(std::memory_order_relaxed)->masked_sum_le(bins.data(), v.data(), bins.size(), limit);
}

OutcomeSums outcome_sums_le(const SliceColumns& s, std::int32_t limit) {
  return current().load(std::memory_order_relaxed)->outcome_sums_le(s, limit);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  return current().load(std::memory_order_relaxed)->sum_squared_diff(a.data(), b.data(), a.size());
}

}  // namespace rtbbench::kernels
