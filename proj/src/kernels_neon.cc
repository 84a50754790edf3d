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

// NEON variants (aarch64 only).

#include <arm_neon.h>

#include "unround/kernels.h"

namespace unround::kernels::neon {
namespace {

inline uint32x4_t Mod5(uint32x4_t x) {
  const uint32x2_t magic = vdup_n_u32(0xCCCCCCCDu);
  const uint64x2_t lo = vshrq_n_u64(vmull_u32(vget_low_u32(x), magic), 34);
  const uint64x2_t hi = vshrq_n_u64(vmull_u32(vget_high_u32(x), magic), 34);
  const uint32x4_t q = vcombine_u32(vmovn_u64(lo), vmovn_u64(hi));
  return vmlsq_n_u32(x, q, 5);
}

}  // namespace

void RroundBatch(const uint32_t* truth, const uint32_t* words, uint32_t* out,
                 size_t n) {
  const uint32x4_t five = vdupq_n_u32(5);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t x = vld1q_u32(truth + i);
    const uint32x4_t w = vld1q_u32(words + i);
    const uint32x4_t r = Mod5(x);
    const uint32x4_t threshold = vmulq_n_u32(r, kWordStep);
    const uint32x4_t up = vandq_u32(vcltq_u32(w, threshold), five);
    vst1q_u32(out + i, vaddq_u32(vsubq_u32(x, r), up));
  }
  for (; i < n; ++i) out[i] = RoundWithWord(truth[i], words[i]);
}

uint64_t AbsDiffSum(const uint32_t* a, const uint32_t* b, size_t n) {
  uint64x2_t acc = vdupq_n_u64(0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t d = vabdq_u32(vld1q_u32(a + i), vld1q_u32(b + i));
    acc = vpadalq_u32(acc, d);
  }
  uint64_t sum = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) sum += a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
  return sum;
}

void OffsetHistogram(const uint32_t* truth, const uint32_t* out, size_t n,
                     uint64_t* bins) {
  uint64_t in_range = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int32x4_t d = vreinterpretq_s32_u32(
        vsubq_u32(vld1q_u32(out + i), vld1q_u32(truth + i)));
    for (int k = 0; k < 9; ++k) {
      const uint32x4_t eq = vceqq_s32(d, vdupq_n_s32(k - 4));
      const uint64_t c = vaddvq_u32(vshrq_n_u32(eq, 31));
      bins[k] += c;
      in_range += c;
    }
  }
  bins[9] += i - in_range;
  scalar::OffsetHistogram(truth + i, out + i, n - i, bins);
}

}  // namespace unround::kernels::neon
