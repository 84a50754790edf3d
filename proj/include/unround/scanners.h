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

// Closed-form detectors for the boundary conditions under which randomly
// rounded partition groups give away their true values.
//
// Let S be the sum of the n published children of a group.
//
//   ExactInvariant       S = I +- 4n, I the exact parent.      Unique solution.
//   ExactInvariantFree   S = P +- 20, P the rounded parent,     Unique solution.
//                        n = 4.
//   ProbInvariant        S = I +- (4n - 1).                    n solutions.
//   ProbInvariantFree    S = P +- 15, n = 3.                   4 solutions.
//
// On the "+" side every true value sits at the low end of its interval
// (Direction::kLower); on the "-" side at the high end (kUpper).
//
// Every scanner requires all rounded values in the group to be at least
// kFloor, so every feasible true value exceeds 10.

#ifndef UNROUND_SCANNERS_H_
#define UNROUND_SCANNERS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "unround/census_model.h"
#include "unround/enumerator.h"

namespace unround {

inline constexpr int64_t kFloor = 15;

enum class FindingKind {
  kExactInvariant,
  kExactInvariantFree,
  kProbInvariant,
  kProbInvariantFree,
};
inline constexpr FindingKind kAllKinds[] = {
    FindingKind::kExactInvariant, FindingKind::kExactInvariantFree,
    FindingKind::kProbInvariant, FindingKind::kProbInvariantFree};

const char* KindName(FindingKind kind);
std::optional<FindingKind> ParseKind(std::string_view name);
bool IsExact(FindingKind kind);

enum class Direction { kUpper, kLower };
const char* DirectionName(Direction d);

// Value -> probability; sums to 1.
using Distribution = Marginal;

// Result of one scanner on one group, before attribute ids are attached.
struct GroupInference {
  FindingKind kind;
  Direction direction;
  // Present for the invariant-free kinds.
  std::optional<Distribution> parent;
  std::vector<Distribution> children;
  // Minimum over attributes of the most likely candidate's probability.
  double confidence = 0.0;
};

// Each returns std::nullopt when the condition does not hold or a
// precondition fails (n < 2, wrong child count, a rounded value below kFloor).
std::optional<GroupInference> ScanExactInvariant(int64_t invariant,
                                                 std::span<const int64_t> published);
std::optional<GroupInference> ScanExactInvariantFree(
    int64_t parent_published, std::span<const int64_t> published);
std::optional<GroupInference> ScanProbInvariant(int64_t invariant,
                                                std::span<const int64_t> published);
std::optional<GroupInference> ScanProbInvariantFree(
    int64_t parent_published, std::span<const int64_t> published);

struct Finding {
  std::string region_id;
  AttributeId parent;
  std::vector<AttributeId> children;
  FindingKind kind;
  Direction direction;
  double confidence = 0.0;
  // Parent first for invariant-free kinds, then children in group order.
  std::vector<std::pair<AttributeId, Distribution>> distributions;
};

struct SkippedGroup {
  std::string region_id;
  AttributeId parent;
  std::string reason;
};

struct ScanOptions {
  // Kinds to run; empty means all.
  std::vector<FindingKind> kinds;
  // Re-derive every finding with the enumerator.
  bool verify = false;
};

struct ScanResult {
  std::vector<Finding> findings;
  std::vector<SkippedGroup> skipped;
  // Data-integrity problems, e.g. an inference below zero.
  std::vector<std::string> warnings;
};

// Runs every enabled scanner on every exclusive/exhaustive group, in schema
// group order and then FindingKind order. With verify on, a finding that
// disagrees with the enumerator is an InternalError.
absl::StatusOr<ScanResult> ScanRegion(const RegionTable& table,
                                      const HierarchySchema& schema,
                                      const ScanOptions& options = {});

// Checks a group inference against exhaustive enumeration: exact kinds must
// match the unique solution; probabilistic kinds must match the marginals.
absl::Status VerifyInference(const GroupInference& inference,
                             std::optional<int64_t> invariant,
                             std::optional<int64_t> parent_published,
                             std::span<const int64_t> published);

}  // namespace unround

#endif  // UNROUND_SCANNERS_H_
