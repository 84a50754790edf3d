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

#include "unround/census_model.h"

#include <algorithm>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace unround {
namespace {

using json = nlohmann::json;

absl::Status Invalid(const std::string& where, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      break;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

// Base-10 non-negative integer; no sign, no whitespace, no overflow.
std::optional<int64_t> ParseCount(std::string_view s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  int64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

absl::StatusOr<HierarchySchema> HierarchySchema::Create(
    std::vector<Attribute> attributes, std::vector<PartitionGroup> groups,
    std::vector<AttributeId> invariants) {
  HierarchySchema schema;
  for (size_t i = 0; i < attributes.size(); ++i) {
    const std::string where = absl::StrCat("attributes[", i, "]");
    if (attributes[i].id.empty()) return Invalid(where, "empty id");
    if (attributes[i].id.front() == '@') {
      return Invalid(where, absl::StrCat("id '", attributes[i].id,
                                         "' uses the reserved '@' prefix"));
    }
    if (!schema.index_.emplace(attributes[i].id, i).second) {
      return Invalid(where, absl::StrCat("duplicate id '", attributes[i].id, "'"));
    }
  }

  std::set<AttributeId, std::less<>> invariant_set;
  for (size_t i = 0; i < invariants.size(); ++i) {
    const std::string where = absl::StrCat("invariants[", i, "]");
    if (!schema.index_.contains(invariants[i])) {
      return Invalid(where, absl::StrCat("dangling reference '", invariants[i], "'"));
    }
    if (!invariant_set.insert(invariants[i]).second) {
      return Invalid(where, absl::StrCat("duplicate invariant '", invariants[i], "'"));
    }
  }

  for (size_t g = 0; g < groups.size(); ++g) {
    const PartitionGroup& group = groups[g];
    const std::string where = absl::StrCat("groups[", g, "]");
    if (!schema.index_.contains(group.parent)) {
      return Invalid(absl::StrCat(where, ".parent"),
                     absl::StrCat("dangling reference '", group.parent, "'"));
    }
    if (group.children.empty()) return Invalid(where, "group has no children");
    if (!schema.group_by_parent_.emplace(group.parent, g).second) {
      return Invalid(where, absl::StrCat("attribute '", group.parent,
                                         "' is the parent of two groups"));
    }
    std::set<std::string_view> seen;
    for (size_t c = 0; c < group.children.size(); ++c) {
      const AttributeId& child = group.children[c];
      const std::string child_where = absl::StrCat(where, ".children[", c, "]");
      if (!schema.index_.contains(child)) {
        return Invalid(child_where, absl::StrCat("dangling reference '", child, "'"));
      }
      if (child == group.parent) {
        return Invalid(child_where,
                       absl::StrCat("'", child, "' is its own group's parent"));
      }
      if (!seen.insert(child).second) {
        return Invalid(child_where, absl::StrCat("duplicate child '", child, "'"));
      }
      auto [it, inserted] = schema.parent_group_.emplace(child, g);
      if (!inserted) {
        return Invalid(child_where,
                       absl::StrCat("forest violation: '", child,
                                    "' is already a child of group '",
                                    groups[it->second].parent, "'"));
      }
    }
  }

  // Each attribute has at most one parent; walking up must terminate.
  for (const auto& [id, unused] : schema.index_) {
    std::string_view cursor = id;
    for (size_t steps = 0;; ++steps) {
      auto it = schema.parent_group_.find(cursor);
      if (it == schema.parent_group_.end()) break;
      cursor = groups[it->second].parent;
      if (steps > groups.size()) {
        return Invalid(absl::StrCat("groups[", it->second, "]"),
                       absl::StrCat("forest violation: cycle through '", id, "'"));
      }
    }
  }

  schema.attributes_ = std::move(attributes);
  schema.groups_ = std::move(groups);
  schema.invariants_ = std::move(invariants);
  return schema;
}

bool HierarchySchema::Contains(std::string_view id) const {
  return index_.contains(id);
}

bool HierarchySchema::IsInvariant(std::string_view id) const {
  return std::find(invariants_.begin(), invariants_.end(), id) != invariants_.end();
}

const Attribute* HierarchySchema::Find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &attributes_[it->second];
}

std::optional<size_t> HierarchySchema::ParentGroupOf(std::string_view id) const {
  auto it = parent_group_.find(id);
  if (it == parent_group_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> HierarchySchema::GroupWithParent(std::string_view id) const {
  auto it = group_by_parent_.find(id);
  if (it == group_by_parent_.end()) return std::nullopt;
  return it->second;
}

bool HierarchySchema::IsInvariantFreeExactCandidate(
    const PartitionGroup& group) const {
  return group.exclusive_exhaustive && !IsInvariant(group.parent) &&
         group.children.size() == 4;
}

bool HierarchySchema::IsInvariantFreeProbabilisticCandidate(
    const PartitionGroup& group) const {
  return group.exclusive_exhaustive && !IsInvariant(group.parent) &&
         group.children.size() == 3;
}

absl::StatusOr<HierarchySchema> ParseHierarchy(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("schema: malformed JSON");
  if (!doc.is_object()) return absl::InvalidArgumentError("schema: expected an object");

  std::vector<Attribute> attributes;
  std::vector<PartitionGroup> groups;
  std::vector<AttributeId> invariants;

  const json& attrs = doc.contains("attributes") ? doc["attributes"] : json::array();
  if (!attrs.is_array()) return Invalid("attributes", "expected an array");
  for (size_t i = 0; i < attrs.size(); ++i) {
    const json& a = attrs[i];
    const std::string where = absl::StrCat("attributes[", i, "]");
    if (!a.is_object() || !a.contains("id") || !a["id"].is_string()) {
      return Invalid(where, "expected {\"id\": string, \"label\": string}");
    }
    Attribute attr{a["id"].get<std::string>(), ""};
    if (a.contains("label")) {
      if (!a["label"].is_string()) return Invalid(where, "label must be a string");
      attr.label = a["label"].get<std::string>();
    }
    attributes.push_back(std::move(attr));
  }

  if (doc.contains("invariants")) {
    const json& inv = doc["invariants"];
    if (!inv.is_array()) return Invalid("invariants", "expected an array");
    for (size_t i = 0; i < inv.size(); ++i) {
      if (!inv[i].is_string()) {
        return Invalid(absl::StrCat("invariants[", i, "]"), "expected a string");
      }
      invariants.push_back(inv[i].get<std::string>());
    }
  }

  if (doc.contains("groups")) {
    const json& gs = doc["groups"];
    if (!gs.is_array()) return Invalid("groups", "expected an array");
    for (size_t g = 0; g < gs.size(); ++g) {
      const json& obj = gs[g];
      const std::string where = absl::StrCat("groups[", g, "]");
      if (!obj.is_object() || !obj.contains("parent") || !obj["parent"].is_string() ||
          !obj.contains("children") || !obj["children"].is_array()) {
        return Invalid(where, "expected {\"parent\": string, \"children\": [string]}");
      }
      PartitionGroup group;
      group.parent = obj["parent"].get<std::string>();
      for (size_t c = 0; c < obj["children"].size(); ++c) {
        const json& child = obj["children"][c];
        if (!child.is_string()) {
          return Invalid(absl::StrCat(where, ".children[", c, "]"), "expected a string");
        }
        group.children.push_back(child.get<std::string>());
      }
      if (obj.contains("exclusive_exhaustive")) {
        if (!obj["exclusive_exhaustive"].is_boolean()) {
          return Invalid(absl::StrCat(where, ".exclusive_exhaustive"), "expected a boolean");
        }
        group.exclusive_exhaustive = obj["exclusive_exhaustive"].get<bool>();
      }
      groups.push_back(std::move(group));
    }
  }

  return HierarchySchema::Create(std::move(attributes), std::move(groups),
                                 std::move(invariants));
}

std::string SerializeHierarchy(const HierarchySchema& schema) {
  json doc;
  doc["attributes"] = json::array();
  for (const Attribute& a : schema.attributes()) {
    doc["attributes"].push_back({{"id", a.id}, {"label", a.label}});
  }
  doc["invariants"] = schema.invariants();
  doc["groups"] = json::array();
  for (const PartitionGroup& g : schema.groups()) {
    doc["groups"].push_back({{"parent", g.parent},
                             {"children", g.children},
                             {"exclusive_exhaustive", g.exclusive_exhaustive}});
  }
  return doc.dump(2) + "\n";
}

std::optional<int64_t> RegionTable::Get(std::string_view id) const {
  auto it = values.find(id);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<std::vector<RegionTable>> ParseTable(
    std::string_view csv, const HierarchySchema& schema,
    const TableParseOptions& options) {
  std::vector<RegionTable> tables;
  std::map<std::string, size_t, std::less<>> by_region;
  size_t line_no = 0;
  bool header_seen = false;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    const std::string_view line = Trim(csv.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = absl::StrCat("line ", line_no);
    const std::vector<std::string_view> fields = SplitCsv(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "region_id" ||
          fields[1] != "attribute_id" || fields[2] != "value") {
        return Invalid(where, "expected header 'region_id,attribute_id,value'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      return Invalid(where, absl::StrCat("expected 3 fields, got ", fields.size()));
    }
    const std::string region(fields[0]);
    const std::string attribute(fields[1]);
    if (region.empty()) return Invalid(where, "empty region_id");
    if (attribute.empty()) return Invalid(where, "empty attribute_id");

    const std::string_view raw = fields[2];
    if (!raw.empty() && raw.front() == '-' && ParseCount(raw.substr(1))) {
      return Invalid(where, absl::StrCat("negative value ", std::string(raw)));
    }
    const std::optional<int64_t> value = ParseCount(raw);
    if (!value.has_value()) {
      return Invalid(where, absl::StrCat("value '", std::string(raw),
                                         "' is not a non-negative integer"));
    }

    auto [it, inserted] = by_region.emplace(region, tables.size());
    if (inserted) tables.push_back(RegionTable{region, {}, false});
    RegionTable& table = tables[it->second];

    if (attribute == kSuppressedPseudoAttribute) {
      if (*value > 1) return Invalid(where, "@suppressed must be 0 or 1");
      table.suppressed = *value == 1;
      continue;
    }
    if (!schema.Contains(attribute)) {
      if (options.strict) {
        return Invalid(where, absl::StrCat("unknown attribute id '", attribute, "'"));
      }
    }
    if (options.published && options.strict && !schema.IsInvariant(attribute) &&
        *value % 5 != 0) {
      return Invalid(where, absl::StrCat("value ", *value, " for '", attribute,
                                         "' is not a multiple of 5"));
    }
    if (!table.values.emplace(attribute, *value).second) {
      return Invalid(where, absl::StrCat("duplicate entry for region '", region,
                                         "', attribute '", attribute, "'"));
    }
  }
  if (!header_seen) return absl::InvalidArgumentError("line 1: missing header");
  return tables;
}

std::string SerializeTables(std::span<const RegionTable> tables) {
  std::string out = "region_id,attribute_id,value\n";
  for (const RegionTable& t : tables) {
    if (t.suppressed) {
      absl::StrAppend(&out, t.region_id, ",", std::string(kSuppressedPseudoAttribute), ",1\n");
    }
    for (const auto& [id, v] : t.values) {
      absl::StrAppend(&out, t.region_id, ",", id, ",", v, "\n");
    }
  }
  return out;
}

std::vector<Violation> ValidateTrueTable(const RegionTable& table,
                                         const HierarchySchema& schema) {
  std::vector<Violation> violations;
  for (const PartitionGroup& group : schema.groups()) {
    if (!group.exclusive_exhaustive) continue;
    std::vector<std::string> missing;
    const std::optional<int64_t> parent = table.Get(group.parent);
    if (!parent) missing.push_back(group.parent);
    int64_t sum = 0;
    for (const AttributeId& child : group.children) {
      if (auto v = table.Get(child)) {
        sum += *v;
      } else {
        missing.push_back(child);
      }
    }
    if (!missing.empty()) {
      violations.push_back(
          {group.parent, absl::StrCat("group ", group.parent, " incomplete: missing ",
                                      absl::StrJoin(missing, ", "))});
    } else if (sum != *parent) {
      violations.push_back({group.parent, absl::StrCat("group ", group.parent,
                                                       " sum mismatch ", sum,
                                                       " != ", *parent)});
    }
  }
  return violations;
}

}  // namespace unround
