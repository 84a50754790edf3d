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

#include "unround/rng.h"

#include <cassert>

namespace unround {

Rng::Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::ForStream(uint64_t master_seed, uint64_t stream) {
  // std::seed_seq's mixing algorithm is specified by the standard.
  std::seed_seq seq{static_cast<uint32_t>(master_seed),
                    static_cast<uint32_t>(master_seed >> 32),
                    static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32), 0x756e726fu};
  uint32_t out[2];
  seq.generate(out, out + 2);
  return Rng((static_cast<uint64_t>(out[1]) << 32) | out[0]);
}

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  assert(lo <= hi);
  const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<int64_t>(engine_());  // full 64-bit span
  // Lemire's nearly-divisionless bounded draw.
  unsigned __int128 m =
      static_cast<unsigned __int128>(engine_()) * static_cast<unsigned __int128>(range);
  uint64_t low = static_cast<uint64_t>(m);
  if (low < range) {
    const uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) *
          static_cast<unsigned __int128>(range);
      low = static_cast<uint64_t>(m);
    }
  }
  return lo + static_cast<int64_t>(m >> 64);
}

double Rng::UniformDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void Rng::FillWords(std::span<uint32_t> words) {
  size_t i = 0;
  for (; i + 1 < words.size(); i += 2) {
    const uint64_t r = engine_();
    words[i] = static_cast<uint32_t>(r);
    words[i + 1] = static_cast<uint32_t>(r >> 32);
  }
  if (i < words.size()) words[i] = static_cast<uint32_t>(engine_());
}

}  // namespace unround
