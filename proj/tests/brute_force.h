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

// Naive Cartesian-product reference for the enumerator. Deliberately shares
// no code with it beyond the rounding likelihood.

#ifndef UNROUND_TESTS_BRUTE_FORCE_H_
#define UNROUND_TESTS_BRUTE_FORCE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "unround/enumerator.h"
#include "unround/rng.h"

namespace unround::testing {

struct OracleSolution {
  std::map<std::string, int64_t> values;
  double probability = 0;
};

// Every assignment of the rounded attributes (plus a rounded parent) within
// [max(0, p - 4), p + 4] that satisfies all sums, with normalized weights.
// Sorted by `values`.
std::vector<OracleSolution> BruteForce(const GroupInstance& instance);

// Random instance with at most `max_attributes` enumerated attributes
// (rounded children, nested children and a rounded parent all count).
// Roughly half are built from a consistent truth so they are feasible.
GroupInstance RandomInstance(Rng& rng, int max_attributes);

// Compares an enumerated space with the oracle; empty string when equal.
std::string DiffAgainstOracle(const SolutionSpace& space,
                              const std::vector<OracleSolution>& oracle,
                              double tolerance = 1e-9);

struct BoundaryStats {
  int instances = 0;        // feasible boundary instances enumerated
  int unique = 0;           // of those, how many had exactly one solution
  size_t min_solutions = 0;
};

// Invariant-free groups with k rounded children: for each children
// configuration (values from {15, 20, 25}; all equal when k > 5) takes the two
// tightest feasible rounded parents on each side and enumerates them.
BoundaryStats InvariantFreeBoundaryStats(int k);

}  // namespace unround::testing

#endif  // UNROUND_TESTS_BRUTE_FORCE_H_
