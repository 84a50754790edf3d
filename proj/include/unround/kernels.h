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

// Batched arithmetic kernels behind the Monte Carlo harness.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at runtime from CPU capabilities and can be overridden with the
// UNROUND_ISA environment variable ("scalar", "avx2", "neon") or
// SetIsaOverride(). All variants are bit-identical to the scalar reference;
// tests/kernels_test.cc enforces that.

#ifndef UNROUND_KERNELS_H_
#define UNROUND_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace unround::kernels {

// floor(2^32 / 5). A rounding word w sends x up iff w < (x mod 5) * kWordStep,
// so the up-probability is (x mod 5)/5 to within 2^-32.
inline constexpr uint32_t kWordStep = 858993459u;

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);
std::optional<Isa> ParseIsa(std::string_view name);

// Best variant supported by this binary on this CPU.
Isa DetectIsa();
// Variant used by the dispatching entry points.
Isa ActiveIsa();
// Forces a variant (std::nullopt restores detection). Unsupported requests
// fall back to scalar.
void SetIsaOverride(std::optional<Isa> isa);
bool IsaAvailable(Isa isa);

// Single-value rounding step shared by the scalar sampler and all kernels.
inline uint32_t RoundWithWord(uint32_t x, uint32_t word) {
  const uint32_t r = x % 5;
  return x - r + (word < r * kWordStep ? 5u : 0u);
}

// Function table for one instruction set.
struct KernelTable {
  // out[i] = RoundWithWord(truth[i], words[i]).
  void (*rround_batch)(const uint32_t* truth, const uint32_t* words,
                       uint32_t* out, size_t n);
  // Sum of |a[i] - b[i]|.
  uint64_t (*abs_diff_sum)(const uint32_t* a, const uint32_t* b, size_t n);
  // Histogram of signed offsets out[i] - truth[i] (taken modulo 2^32 as an
  // int32) in [-4, 4]; bins[k + 4]. Other offsets are counted in bins[9].
  void (*offset_histogram)(const uint32_t* truth, const uint32_t* out,
                           size_t n, uint64_t* bins);
};

const KernelTable& Table(Isa isa);

// Dispatching entry points. Spans must have matching lengths.
void RroundBatch(std::span<const uint32_t> truth,
                 std::span<const uint32_t> words, std::span<uint32_t> out);
uint64_t AbsDiffSum(std::span<const uint32_t> a, std::span<const uint32_t> b);
void OffsetHistogram(std::span<const uint32_t> truth,
                     std::span<const uint32_t> out, std::span<uint64_t, 10> bins);

namespace scalar {
void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n);
uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n);
void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins);
}  // namespace scalar

namespace avx2 {
void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n);
uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n);
void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins);
}  // namespace avx2

namespace neon {
void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n);
uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n);
void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins);
}  // namespace neon

}  // namespace unround::kernels

#endif  // UNROUND_KERNELS_H_
