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

// Noise mechanisms applied to published counts.
//
// Random rounding sends a count x to one of the two multiples of 5 around it:
// down to x - (x mod 5) with probability 1 - (x mod 5)/5, otherwise up to the
// next multiple. Multiples of 5 are published unchanged. The discrete Laplace
// mechanism adds integer noise N with P[N = k] proportional to exp(-|k|/t).

#ifndef UNROUND_MECHANISMS_H_
#define UNROUND_MECHANISMS_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "unround/census_model.h"
#include "unround/rng.h"

namespace unround {

// An exact probability k/5, which is all random rounding ever produces.
struct Fifths {
  int numerator = 0;  // 0..5

  double value() const { return numerator / 5.0; }
  friend bool operator==(Fifths, Fifths) = default;
};

struct RoundingOutcome {
  int64_t value = 0;
  Fifths probability;

  friend bool operator==(const RoundingOutcome&, const RoundingOutcome&) = default;
};

// One or two outcomes, ascending by value, all with non-zero probability.
using RoundingPmf = std::vector<RoundingOutcome>;

// Inclusive integer interval.
struct Interval {
  int64_t lo = 0;
  int64_t hi = 0;

  int64_t width() const { return hi - lo + 1; }
  bool contains(int64_t v) const { return v >= lo && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Requires x >= 0.
RoundingPmf RroundPmf(int64_t x);

// Draws one published value, consuming one engine output from `rng`. Uses
// the same decision rule as the batched kernels.
int64_t RroundSample(int64_t x, Rng& rng);

// P[rround(true_value) = observed] as an exact fraction.
Fifths RroundObservationFifths(int64_t true_value, int64_t observed);
double RroundObservationProb(int64_t true_value, int64_t observed);

// Every true value that can publish as `observed`: [max(0, o - 4), o + 4].
Interval TrueValueBounds(int64_t observed);

struct DiscreteLaplaceParams {
  double t = 1.45;
  bool clamp_at_zero = false;
};

// PMF of the noise offset: (e^{1/t} - 1)/(e^{1/t} + 1) * e^{-|x|/t}.
double DlapPmf(int64_t x, const DiscreteLaplaceParams& params);
// Leading constant of DlapPmf, i.e. DlapPmf(0).
double DlapNormalizer(double t);

// Noise offset drawn as the difference of two geometric variables with
// success probability 1 - e^{-1/t}.
int64_t DlapNoise(double t, Rng& rng);

// x + noise, floored at 0 when clamp_at_zero is set.
int64_t DlapSample(int64_t x, const DiscreteLaplaceParams& params, Rng& rng);

struct MechanismSpec {
  enum class Kind { kRandomRounding, kDiscreteLaplace };

  Kind kind = Kind::kRandomRounding;
  DiscreteLaplaceParams laplace;
};

// Publishes a ground-truth table. Invariant attributes pass through; every
// other value receives an independent draw, in attribute-id order. Fails if
// the table breaks any exclusive/exhaustive partition of `schema`.
absl::StatusOr<RegionTable> ApplyMechanism(const RegionTable& truth,
                                           const HierarchySchema& schema,
                                           const MechanismSpec& spec, Rng& rng);

}  // namespace unround

#endif  // UNROUND_MECHANISMS_H_
