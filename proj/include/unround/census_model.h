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

// Hierarchical census count tables: attribute trees, partition groups,
// invariant flags and per-region values.
//
// Schema documents are JSON:
//
//   {"attributes": [{"id": "A0", "label": "Total"}, ...],
//    "invariants": ["A0"],
//    "groups": [{"parent": "A0", "children": ["A1", "A5", "A6"],
//                "exclusive_exhaustive": true}, ...]}
//
// Region data is CSV with the header `region_id,attribute_id,value`, one row
// per (region, attribute). A row whose attribute_id is `@suppressed` with
// value 1 marks the whole region as suppressed.

#ifndef UNROUND_CENSUS_MODEL_H_
#define UNROUND_CENSUS_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace unround {

using AttributeId = std::string;

inline constexpr std::string_view kSuppressedPseudoAttribute = "@suppressed";

struct Attribute {
  AttributeId id;
  std::string label;
};

// A parent whose true count is the sum of its children's true counts when
// exclusive_exhaustive is set.
struct PartitionGroup {
  AttributeId parent;
  std::vector<AttributeId> children;
  bool exclusive_exhaustive = true;
};

class HierarchySchema {
 public:
  // Validates and builds a schema. Errors name the offending entry.
  static absl::StatusOr<HierarchySchema> Create(
      std::vector<Attribute> attributes, std::vector<PartitionGroup> groups,
      std::vector<AttributeId> invariants);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const std::vector<PartitionGroup>& groups() const { return groups_; }
  const std::vector<AttributeId>& invariants() const { return invariants_; }

  bool Contains(std::string_view id) const;
  bool IsInvariant(std::string_view id) const;
  const Attribute* Find(std::string_view id) const;
  // Index into groups() of the group that lists `id` as a child.
  std::optional<size_t> ParentGroupOf(std::string_view id) const;
  // Index into groups() of the group whose parent is `id`.
  std::optional<size_t> GroupWithParent(std::string_view id) const;

  bool IsInvariantFreeExactCandidate(const PartitionGroup& group) const;
  bool IsInvariantFreeProbabilisticCandidate(const PartitionGroup& group) const;

 private:
  HierarchySchema() = default;

  std::vector<Attribute> attributes_;
  std::vector<PartitionGroup> groups_;
  std::vector<AttributeId> invariants_;
  std::map<AttributeId, size_t, std::less<>> index_;
  std::map<AttributeId, size_t, std::less<>> parent_group_;
  std::map<AttributeId, size_t, std::less<>> group_by_parent_;
};

absl::StatusOr<HierarchySchema> ParseHierarchy(std::string_view json);
std::string SerializeHierarchy(const HierarchySchema& schema);

// One region's values. Ground-truth tables hold exact counts; published
// tables hold mechanism output.
struct RegionTable {
  std::string region_id;
  std::map<AttributeId, int64_t, std::less<>> values;
  bool suppressed = false;

  std::optional<int64_t> Get(std::string_view id) const;

  friend bool operator==(const RegionTable&, const RegionTable&) = default;
};

struct TableParseOptions {
  // Input is mechanism output rather than ground truth.
  bool published = false;
  // Unknown attribute ids are errors, and (for published tables) every
  // non-invariant value must be a multiple of 5.
  bool strict = false;
};

// Regions are returned in order of first appearance.
absl::StatusOr<std::vector<RegionTable>> ParseTable(
    std::string_view csv, const HierarchySchema& schema,
    const TableParseOptions& options = {});
std::string SerializeTables(std::span<const RegionTable> tables);

struct Violation {
  AttributeId group_parent;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks every exclusive/exhaustive group sums exactly. Empty iff valid.
std::vector<Violation> ValidateTrueTable(const RegionTable& table,
                                         const HierarchySchema& schema);

}  // namespace unround

#endif  // UNROUND_CENSUS_MODEL_H_
