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

// Expected distance between published and true counts for random rounding
// and for discrete Laplace noise.

#ifndef UNROUND_UTILITY_ANALYSIS_H_
#define UNROUND_UTILITY_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "unround/mechanisms.h"
#include "unround/rng.h"

namespace unround {

// One residue class of the random-rounding utility table.
struct ResidueRow {
  int residue = 0;
  double sample_probability = 0.2;
  // E[|rround(x) - x|] for x in this residue class.
  double distance = 0;
  double weighted_distance = 0;
};

// Rows for residues 0..4, computed from RroundPmf.
std::array<ResidueRow, 5> RroundResidueTable();

// Mean |rround(x) - x| with residues uniform; exactly 1.6.
double RroundExpectedDistance();

struct DlapDistance {
  double truncated = 0;    // sum over |x| <= R of |x| pmf(x)
  double closed_form = 0;  // 2 C q / (1 - q)^2, q = e^{-1/t}
  // 2 C sum_{k > R} k q^k, the exact truncation error.
  double tail = 0;
  int radius = 0;
};

// Requires truncation_radius >= 10.
DlapDistance DlapExpectedDistance(const DiscreteLaplaceParams& params,
                                  int truncation_radius = 10);

// P[|noise| <= radius] for the discrete Laplace.
double DlapMassWithin(double t, int radius);

enum class UtilityMethod { kExactEnumeration, kTruncatedSeries, kSampled };
const char* UtilityMethodName(UtilityMethod m);

struct UtilityReport {
  std::string mechanism;
  double expected_abs_distance = 0;
  std::optional<double> closed_form_distance;
  // Radius 1..10 -> probability of landing within that distance.
  std::map<int, double> mass_within;
  UtilityMethod method = UtilityMethod::kExactEnumeration;
};

struct UtilityComparison {
  UtilityReport rround;
  UtilityReport laplace;
  // Laplace expected distance (closed form) below random rounding's.
  bool laplace_closer = false;
  double relative_improvement = 0;  // 1 - laplace / rround
  bool laplace_mass_within_4_ok = false;  // >= 0.95
};

UtilityComparison Compare(const DiscreteLaplaceParams& params);

// Clamping breaks the symmetry the closed forms rely on, so the clamped
// mechanism is measured by sampling: mean |published - x| at a fixed x.
UtilityReport EmpiricalLaplaceUtility(const DiscreteLaplaceParams& params,
                                      int64_t true_value, uint64_t draws, Rng& rng);

// Mean |rround(x) - x| over `draws` values uniform on [low, high], drawn
// through the batched kernels.
double EmpiricalRroundDistance(int64_t low, int64_t high, uint64_t draws, Rng& rng);

// Plain-text bar charts of the signed published-minus-true distance PMFs.
std::string RenderSignedDistancePmfs(const DiscreteLaplaceParams& params,
                                     int radius = 8, int bar_width = 40);

}  // namespace unround

#endif  // UNROUND_UTILITY_ANALYSIS_H_
