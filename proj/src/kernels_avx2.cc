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

// AVX2 variants. This translation unit is compiled with -mavx2 and only
// entered after a runtime CPU check.

#include <immintrin.h>

#include "unround/kernels.h"

namespace unround::kernels::avx2 {
namespace {

// x mod 5 for eight unsigned lanes: q = (x * 0xCCCCCCCD) >> 34 is exact for
// every 32-bit x.
inline __m256i Mod5(__m256i x) {
  const __m256i magic = _mm256_set1_epi32(static_cast<int>(0xCCCCCCCDu));
  const __m256i even = _mm256_srli_epi64(_mm256_mul_epu32(x, magic), 34);
  const __m256i odd = _mm256_srli_epi64(
      _mm256_mul_epu32(_mm256_srli_epi64(x, 32), magic), 34);
  const __m256i q = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  const __m256i q5 = _mm256_add_epi32(_mm256_slli_epi32(q, 2), q);
  return _mm256_sub_epi32(x, q5);
}

// Unsigned a < b.
inline __m256i LessU32(__m256i a, __m256i b) {
  const __m256i sign = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  return _mm256_cmpgt_epi32(_mm256_xor_si256(b, sign),
                            _mm256_xor_si256(a, sign));
}

}  // namespace

void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n) {
  const __m256i step = _mm256_set1_epi32(static_cast<int>(kWordStep));
  const __m256i five = _mm256_set1_epi32(5);
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(truth + i));
    const __m256i w =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + i));
    const __m256i r = Mod5(x);
    const __m256i threshold = _mm256_mullo_epi32(r, step);
    const __m256i up = _mm256_and_si256(LessU32(w, threshold), five);
    const __m256i y = _mm256_add_epi32(_mm256_sub_epi32(x, r), up);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), y);
  }
  for (; i < n; ++i) out[i] = RoundWithWord(truth[i], words[i]);
}

uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n) {
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i d =
        _mm256_sub_epi32(_mm256_max_epu32(va, vb), _mm256_min_epu32(va, vb));
    acc = _mm256_add_epi64(acc,
                           _mm256_cvtepu32_epi64(_mm256_castsi256_si128(d)));
    acc = _mm256_add_epi64(
        acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(d, 1)));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) sum += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return sum;
}

void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins) {
  // Per-lane 32-bit counters, flushed before they can overflow.
  constexpr size_t kFlushEvery = size_t{1} << 28;
  __m256i counts[9];
  for (auto& c : counts) c = _mm256_setzero_si256();
  uint64_t in_range = 0;
  size_t i = 0;
  size_t since_flush = 0;
  auto flush = [&] {
    for (int k = 0; k < 9; ++k) {
      alignas(32) uint32_t lanes[8];
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), counts[k]);
      uint64_t s = 0;
      for (uint32_t v : lanes) s += v;
      bins[k] += s;
      in_range += s;
      counts[k] = _mm256_setzero_si256();
    }
  };
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(truth + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(out + i));
    const __m256i d = _mm256_sub_epi32(y, x);
    for (int k = 0; k < 9; ++k) {
      const __m256i eq = _mm256_cmpeq_epi32(d, _mm256_set1_epi32(k - 4));
      counts[k] = _mm256_sub_epi32(counts[k], eq);  // eq lanes are -1
    }
    if (++since_flush == kFlushEvery) {
      flush();
      since_flush = 0;
    }
  }
  flush();
  bins[9] += i - in_range;
  scalar::OffsetHistogram(truth + i, out + i, n - i, bins);
}

}  // namespace unround::kernels::avx2
