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

#include "unround/mechanisms.h"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "unround/kernels.h"

namespace unround {

RoundingPmf RroundPmf(int64_t x) {
  assert(x >= 0);
  const int64_t r = x % 5;
  const int64_t down = x - r;
  if (r == 0) return {{x, Fifths{5}}};
  return {{down, Fifths{static_cast<int>(5 - r)}},
          {down + 5, Fifths{static_cast<int>(r)}}};
}

int64_t RroundSample(int64_t x, Rng& rng) {
  assert(x >= 0);
  uint32_t word;
  rng.FillWords({&word, 1});
  const int64_t r = x % 5;
  return x - r + (word < static_cast<uint32_t>(r) * kernels::kWordStep ? 5 : 0);
}

Fifths RroundObservationFifths(int64_t true_value, int64_t observed) {
  if (true_value < 0) return Fifths{0};
  for (const RoundingOutcome& o : RroundPmf(true_value)) {
    if (o.value == observed) return o.probability;
  }
  return Fifths{0};
}

double RroundObservationProb(int64_t true_value, int64_t observed) {
  return RroundObservationFifths(true_value, observed).value();
}

Interval TrueValueBounds(int64_t observed) {
  return {std::max<int64_t>(0, observed - 4), observed + 4};
}

double DlapNormalizer(double t) {
  // (e^{1/t} - 1)/(e^{1/t} + 1) == tanh(1/(2t)), which stays accurate for
  // large t.
  return std::tanh(0.5 / t);
}

double DlapPmf(int64_t x, const DiscreteLaplaceParams& params) {
  assert(params.t > 0);
  const double magnitude = static_cast<double>(x < 0 ? -x : x);
  return DlapNormalizer(params.t) * std::exp(-magnitude / params.t);
}

namespace {

// Failures before the first success, success probability 1 - e^{-1/t}:
// floor(ln(U) / ln(e^{-1/t})) = floor(-t ln U) with U in (0, 1].
int64_t Geometric(double t, Rng& rng) {
  const double u = 1.0 - rng.UniformDouble();
  return static_cast<int64_t>(std::floor(-t * std::log(u)));
}

}  // namespace

int64_t DlapNoise(double t, Rng& rng) {
  assert(t > 0);
  const int64_t a = Geometric(t, rng);
  const int64_t b = Geometric(t, rng);
  return a - b;
}

int64_t DlapSample(int64_t x, const DiscreteLaplaceParams& params, Rng& rng) {
  const int64_t y = x + DlapNoise(params.t, rng);
  return params.clamp_at_zero ? std::max<int64_t>(0, y) : y;
}

absl::StatusOr<RegionTable> ApplyMechanism(const RegionTable& truth,
                                           const HierarchySchema& schema,
                                           const MechanismSpec& spec, Rng& rng) {
  const std::vector<Violation> violations = ValidateTrueTable(truth, schema);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    for (const Violation& v : violations) messages.push_back(v.message);
    return absl::InvalidArgumentError(absl::StrCat(
        "region ", truth.region_id, ": ", absl::StrJoin(messages, "; ")));
  }
  RegionTable published{truth.region_id, {}, truth.suppressed};
  for (const auto& [id, value] : truth.values) {
    if (schema.IsInvariant(id)) {
      published.values.emplace(id, value);
      continue;
    }
    if (value < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "region ", truth.region_id, ": negative true value for '", id, "'"));
    }
    switch (spec.kind) {
      case MechanismSpec::Kind::kRandomRounding:
        published.values.emplace(id, RroundSample(value, rng));
        break;
      case MechanismSpec::Kind::kDiscreteLaplace:
        published.values.emplace(id, DlapSample(value, spec.laplace, rng));
        break;
    }
  }
  return published;
}

}  // namespace unround
