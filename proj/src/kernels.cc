// Copyright 2026 The Unround Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "unround/kernels.h"

#include <atomic>
#include <cassert>
#include <cstdlib>

namespace unround::kernels {

namespace scalar {

void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = RoundWithWord(truth[i], words[i]);
}

uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n) {
  uint64_t sum = 0;
  for (size_t i = 0; i < n; ++i) sum += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return sum;
}

void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins) {
  for (size_t i = 0; i < n; ++i) {
    const int32_t d = static_cast<int32_t>(out[i] - truth[i]);
    if (d >= -4 && d <= 4) {
      ++bins[d + 4];
    } else {
      ++bins[9];
    }
  }
}

}  // namespace scalar

namespace {

constexpr KernelTable kScalarTable = {&scalar::RroundBatch, &scalar::AbsDiffSum,
                                      &scalar::OffsetHistogram};
#if defined(UNROUND_HAVE_AVX2_TU)
constexpr KernelTable kAvx2Table = {&avx2::RroundBatch, &avx2::AbsDiffSum,
                                    &avx2::OffsetHistogram};
#endif
#if defined(UNROUND_HAVE_NEON_TU)
constexpr KernelTable kNeonTable = {&neon::RroundBatch, &neon::AbsDiffSum,
                                    &neon::OffsetHistogram};
#endif

// -1: no override.
std::atomic<int> g_override{-1};

std::optional<Isa> EnvOverride() {
  const char* env = std::getenv("UNROUND_ISA");
  if (env == nullptr) return std::nullopt;
  return ParseIsa(env);
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "scalar";
}

std::optional<Isa> ParseIsa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  return std::nullopt;
}

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(UNROUND_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(UNROUND_HAVE_NEON_TU)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

Isa DetectIsa() {
  if (IsaAvailable(Isa::kAvx2)) return Isa::kAvx2;
  if (IsaAvailable(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa ActiveIsa() {
  const int forced = g_override.load(std::memory_order_relaxed);
  if (forced >= 0) {
    const Isa isa = static_cast<Isa>(forced);
    return IsaAvailable(isa) ? isa : Isa::kScalar;
  }
  static const Isa detected = [] {
    if (auto env = EnvOverride(); env.has_value()) {
      return IsaAvailable(*env) ? *env : Isa::kScalar;
    }
    return DetectIsa();
  }();
  return detected;
}

void SetIsaOverride(std::optional<Isa> isa) {
  g_override.store(isa.has_value() ? static_cast<int>(*isa) : -1,
                   std::memory_order_relaxed);
}

const KernelTable& Table(Isa isa) {
  switch (isa) {
#if defined(UNROUND_HAVE_AVX2_TU)
    case Isa::kAvx2:
      if (IsaAvailable(isa)) return kAvx2Table;
      break;
#endif
#if defined(UNROUND_HAVE_NEON_TU)
    case Isa::kNeon:
      return kNeonTable;
#endif
    default:
      break;
  }
  return kScalarTable;
}

void RroundBatch(std::span<const uint32_t> truth,
                 std::span<const uint32_t> words, std::span<uint32_t> out) {
  assert(truth.size() == words.size() && truth.size() == out.size());
  Table(ActiveIsa()).rround_batch(truth.data(), words.data(), out.data(),
                                  truth.size());
}

uint64_t AbsDiffSum(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  assert(a.size() == b.size());
  return Table(ActiveIsa()).abs_diff_sum(a.data(), b.data(), a.size());
}

void OffsetHistogram(std::span<const uint32_t> truth,
                     std::span<const uint32_t> out,
                     std::span<uint64_t, 10> bins) {
  assert(truth.size() == out.size());
  Table(ActiveIsa()).offset_histogram(truth.data(), out.data(), truth.size(),
                                      bins.data());
}

}  // namespace unround::kernels
