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

// Attack success rates: closed forms and Monte Carlo measurement on synthetic
// groups.

#ifndef UNROUND_SIMULATOR_H_
#define UNROUND_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "unround/census_model.h"
#include "unround/rng.h"
#include "unround/scanners.h"

namespace unround {

struct AttackRateQuery {
  FindingKind kind = FindingKind::kExactInvariant;
  // Rounded children. Must be 4 for kExactInvariantFree and 3 for
  // kProbInvariantFree.
  int n = 2;
};

// Probability that one group with uniformly distributed residues meets the
// kind's boundary condition:
//   kExactInvariant      2 (1/5)^(2n)
//   kExactInvariantFree  2 (1/5)^9
//   kProbInvariant       2n (1/5)^(2n-1) (2/5)
//   kProbInvariantFree   8 (1/5)^6 (2/5)
absl::StatusOr<double> AnalyticRate(const AttackRateQuery& query);
absl::StatusOr<double> ExpectedCount(const AttackRateQuery& query,
                                     double population_of_groups);

struct RatePopulation {
  std::string label;
  double groups = 0;
};

struct RateRow {
  std::string label;
  AttackRateQuery query;
  double rate = 0;
  std::vector<RatePopulation> populations;
  // Counts observed on the 2021 disclosure, for side-by-side display.
  std::optional<double> observed;
};

// The reference table: rates for the five attacks and expected counts over
// the eligible-group totals of the 2021 Canadian disclosure.
std::vector<RateRow> ReferenceRateTable();

struct TrialConfig {
  FindingKind kind = FindingKind::kExactInvariant;
  int n = 2;
  uint64_t trials = 1'000'000;
  int64_t truth_low = 11;
  int64_t truth_high = 510;
  uint64_t seed = 1;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

absl::Status ValidateTrialConfig(const TrialConfig& config);

// Ids "P" (parent) and "C1".."Cn". P is invariant for the invariant kinds.
HierarchySchema SyntheticSchema(FindingKind kind, int n);

struct SyntheticGroup {
  RegionTable truth;
  RegionTable published;
};

// Children uniform on [truth_low, truth_high], parent their exact sum,
// published through random rounding.
absl::StatusOr<SyntheticGroup> GenGroup(const TrialConfig& config, Rng& rng);

struct TrialReport {
  FindingKind kind;
  int n = 0;
  uint64_t trials = 0;
  uint64_t seed = 0;
  uint64_t fires = 0;
  double empirical_rate = 0;
  double analytic_rate = 0;
  // (fires - trials p) / sqrt(trials p (1 - p)).
  double z_score = 0;
  // Exact fires whose inference differs from the truth, or probabilistic
  // fires whose support misses it.
  uint64_t soundness_violations = 0;
  // Probabilistic kinds: how often the first child's most likely candidate
  // equals the truth, against the claimed confidence.
  uint64_t calibration_hits = 0;
  double claimed_confidence = 1.0;
  double calibration_rate = 0;
  double calibration_z = 0;
  std::string isa;
};

// Runs the trials in fixed chunks, each with its own Rng stream derived from
// (seed, chunk index), so results do not depend on the thread count.
absl::StatusOr<TrialReport> RunTrials(const TrialConfig& config);

}  // namespace unround

#endif  // UNROUND_SIMULATOR_H_
