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

// Exhaustive enumeration of the true-value assignments consistent with a
// published partition group.
//
// Every rounded attribute's true value is confined to TrueValueBounds of its
// published value, and every partition sums exactly. Each feasible assignment
// is weighted by the probability that random rounding would have produced the
// published values from it. Because every rounded attribute contributes one
// factor k/5, all weights share the denominator 5^(number of rounded
// attributes), so weights are carried as exact integer numerators.

#ifndef UNROUND_ENUMERATOR_H_
#define UNROUND_ENUMERATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "unround/census_model.h"

namespace unround {

// A rounded attribute, optionally partitioned further by its own children.
// When `children` is non-empty their true values must sum to this node's true
// value.
struct ChildNode {
  AttributeId id;
  int64_t published = 0;
  std::vector<ChildNode> children;
};

// A partition group to enumerate. The parent is either an exact invariant, a
// rounded value (`parent_published`), or absent; in the last case the
// top-level children are an unconstrained family and only nested groups
// impose sums.
struct GroupInstance {
  AttributeId parent_id = "parent";
  std::optional<int64_t> invariant;
  std::optional<int64_t> parent_published;
  std::vector<ChildNode> children;
};

// Builds a flat instance with children named C1..Cn.
GroupInstance MakeInstance(std::optional<int64_t> invariant,
                           std::optional<int64_t> parent_published,
                           const std::vector<int64_t>& children_published);

using Marginal = std::map<int64_t, double>;

struct Solution {
  // Aligned with SolutionSpace::attribute_ids.
  std::vector<int64_t> values;
  // Likelihood is numerator / 5^rounded_attributes.
  uint64_t likelihood_numerator = 0;
  double probability = 0.0;
};

struct SolutionSpace {
  // Enumeration order: parent (when present), then breadth-first children.
  std::vector<AttributeId> attribute_ids;
  // Ascending lexicographic order of `values`.
  std::vector<Solution> solutions;
  int rounded_attributes = 0;
  // False only when no assignment is feasible.
  bool normalized = false;
  std::vector<Marginal> marginals;

  std::optional<size_t> IndexOf(const AttributeId& id) const;
  const Marginal* MarginalFor(const AttributeId& id) const;
};

struct EnumerateOptions {
  // Refuse instances whose raw product of per-attribute interval widths
  // exceeds this.
  uint64_t raw_assignment_cap = 10'000'000;
};

// Errors: InvalidArgument for malformed instances, ResourceExhausted when the
// raw bound exceeds the cap. Infeasible instances yield an empty space.
absl::StatusOr<SolutionSpace> Enumerate(const GroupInstance& instance,
                                        const EnumerateOptions& options = {});

// Raw product of interval widths (saturating).
uint64_t RawAssignmentBound(const GroupInstance& instance);

// Per-attribute distributions aggregated from solution weights.
std::vector<Marginal> Marginals(const SolutionSpace& space);

struct RankedSolution {
  std::vector<int64_t> values;
  double probability = 0.0;
};

// Most likely solutions first; equal likelihoods in lexicographic order.
std::vector<RankedSolution> TopK(const SolutionSpace& space, size_t k);

struct CredibleSet {
  std::vector<int64_t> values;  // ascending
  double achieved_mass = 0.0;
};

// Smallest set reaching `mass`, built greedily by probability (ties prefer
// the smaller value).
CredibleSet CredibleInterval(const Marginal& marginal, double mass);

// Plain-text horizontal bar chart of one marginal.
std::string RenderHistogram(const AttributeId& id, const Marginal& marginal,
                            int bar_width = 40);

}  // namespace unround

#endif  // UNROUND_ENUMERATOR_H_
