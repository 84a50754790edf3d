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

#ifndef UNROUND_RNG_H_
#define UNROUND_RNG_H_

#include <cstdint>
#include <random>
#include <span>

namespace unround {

// Seeded random source shared by every stochastic operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. All derived draws (bounded integers, unit doubles, 32-bit words)
// are computed here rather than through <random> distributions, whose
// algorithms are implementation-defined. The same seed therefore produces the
// same stream on every conforming platform.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Independent stream for (master seed, stream index), used to give each
  // simulation chunk or worker its own generator.
  static Rng ForStream(uint64_t master_seed, uint64_t stream);

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform integer in [lo, hi], unbiased (multiply-shift with rejection).
  int64_t UniformInt(int64_t lo, int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();

  // Fills `words` with raw 32-bit words, two per engine output (low half
  // first). This is the feed for the batched rounding kernels.
  void FillWords(std::span<uint32_t> words);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace unround

#endif  // UNROUND_RNG_H_
