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

#include "unround/json_report.h"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace unround {
namespace {

absl::Status ParseError(const std::string& where, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat(where, ": ", what));
}

absl::StatusOr<int64_t> ReadCount(const Json& node, const std::string& where) {
  if (!node.is_number_integer()) return ParseError(where, "expected an integer");
  if (node.is_number_unsigned()) {
    const uint64_t v = node.get<uint64_t>();
    if (v > static_cast<uint64_t>(INT64_MAX)) return ParseError(where, "out of range");
    return static_cast<int64_t>(v);
  }
  return node.get<int64_t>();
}

absl::StatusOr<ChildNode> ReadNode(const Json& node, const std::string& where) {
  if (!node.is_object()) return ParseError(where, "expected an object");
  ChildNode out;
  auto id = node.find("id");
  if (id == node.end() || !id->is_string()) {
    return ParseError(where, "missing string field 'id'");
  }
  out.id = id->get<std::string>();
  auto published = node.find("published");
  if (published == node.end()) return ParseError(where, "missing field 'published'");
  absl::StatusOr<int64_t> value = ReadCount(*published, absl::StrCat(where, ".published"));
  if (!value.ok()) return value.status();
  out.published = *value;
  if (auto kids = node.find("children"); kids != node.end()) {
    if (!kids->is_array()) return ParseError(where, "'children' must be an array");
    for (size_t i = 0; i < kids->size(); ++i) {
      absl::StatusOr<ChildNode> child =
          ReadNode((*kids)[i], absl::StrCat(where, ".children[", i, "]"));
      if (!child.ok()) return child.status();
      out.children.push_back(*std::move(child));
    }
  }
  return out;
}

Json NodeToJson(const ChildNode& node) {
  Json j;
  j["id"] = node.id;
  j["published"] = node.published;
  if (!node.children.empty()) {
    Json kids = Json::array();
    for (const ChildNode& c : node.children) kids.push_back(NodeToJson(c));
    j["children"] = std::move(kids);
  }
  return j;
}

Json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string FormatProb(double p) { return absl::StrFormat("%.15g", p); }

Json DistributionToJson(const Distribution& d) {
  Json out = Json::array();
  for (const auto& [value, prob] : d) {
    out.push_back(Json{{"value", value}, {"prob", FormatProb(prob)}});
  }
  return out;
}

Json FindingsToJson(std::span<const Finding> findings) {
  Json out = Json::array();
  for (const Finding& f : findings) {
    Json j;
    j["region_id"] = f.region_id;
    j["parent"] = f.parent;
    j["children"] = f.children;
    j["kind"] = KindName(f.kind);
    j["direction"] = DirectionName(f.direction);
    j["confidence"] = FormatProb(f.confidence);
    Json dists = Json::object();
    for (const auto& [id, dist] : f.distributions) dists[id] = DistributionToJson(dist);
    j["distributions"] = std::move(dists);
    out.push_back(std::move(j));
  }
  return out;
}

Json SolutionSpaceToJson(const SolutionSpace& space, size_t top_k) {
  Json j;
  j["attribute_ids"] = space.attribute_ids;
  j["rounded_attributes"] = space.rounded_attributes;
  j["normalized"] = space.normalized;
  j["solution_count"] = space.solutions.size();
  auto assignment = [&](const std::vector<int64_t>& values) {
    Json a = Json::object();
    for (size_t i = 0; i < values.size(); ++i) a[space.attribute_ids[i]] = values[i];
    return a;
  };
  Json solutions = Json::array();
  if (top_k == 0) {
    for (const Solution& s : space.solutions) {
      solutions.push_back(
          Json{{"assignment", assignment(s.values)}, {"prob", FormatProb(s.probability)}});
    }
  } else {
    for (const RankedSolution& s : TopK(space, top_k)) {
      solutions.push_back(
          Json{{"assignment", assignment(s.values)}, {"prob", FormatProb(s.probability)}});
    }
  }
  j["solutions"] = std::move(solutions);
  Json marginals = Json::object();
  for (size_t i = 0; i < space.marginals.size(); ++i) {
    marginals[space.attribute_ids[i]] = DistributionToJson(space.marginals[i]);
  }
  j["marginals"] = std::move(marginals);
  return j;
}

Json CredibleSetToJson(const AttributeId& id, double mass, const CredibleSet& set) {
  return Json{{"attribute", id},
              {"mass", FormatProb(mass)},
              {"values", set.values},
              {"achieved_mass", FormatProb(set.achieved_mass)}};
}

Json TrialReportToJson(const TrialReport& r) {
  Json j;
  j["kind"] = KindName(r.kind);
  j["n"] = r.n;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["fires"] = r.fires;
  j["empirical_rate"] = FormatProb(r.empirical_rate);
  j["analytic_rate"] = FormatProb(r.analytic_rate);
  j["z_score"] = r.z_score;
  j["soundness_violations"] = r.soundness_violations;
  j["claimed_confidence"] = FormatProb(r.claimed_confidence);
  j["calibration_hits"] = r.calibration_hits;
  j["calibration_rate"] = FormatProb(r.calibration_rate);
  j["calibration_z"] = r.calibration_z;
  j["isa"] = r.isa;
  return j;
}

Json RateTableToJson(std::span<const RateRow> rows) {
  Json out = Json::array();
  for (const RateRow& row : rows) {
    Json j;
    j["label"] = row.label;
    j["kind"] = KindName(row.query.kind);
    j["n"] = row.query.n;
    j["rate"] = FormatProb(row.rate);
    j["one_in"] = 1.0 / row.rate;
    Json expected = Json::array();
    for (const RatePopulation& p : row.populations) {
      expected.push_back(Json{{"population_label", p.label},
                              {"groups", p.groups},
                              {"expected", row.rate * p.groups}});
    }
    j["expected_counts"] = std::move(expected);
    j["observed"] = OptionalNumber(row.observed);
    out.push_back(std::move(j));
  }
  return out;
}

Json UtilityReportToJson(const UtilityReport& r) {
  Json j;
  j["mechanism"] = r.mechanism;
  j["method"] = UtilityMethodName(r.method);
  j["expected_abs_distance"] = FormatProb(r.expected_abs_distance);
  j["closed_form_distance"] = r.closed_form_distance.has_value()
                                  ? Json(FormatProb(*r.closed_form_distance))
                                  : Json(nullptr);
  Json mass = Json::object();
  for (const auto& [radius, p] : r.mass_within) mass[std::to_string(radius)] = FormatProb(p);
  j["mass_within"] = std::move(mass);
  return j;
}

Json UtilityComparisonToJson(const UtilityComparison& c) {
  Json j;
  j["random_rounding"] = UtilityReportToJson(c.rround);
  j["discrete_laplace"] = UtilityReportToJson(c.laplace);
  j["laplace_closer"] = c.laplace_closer;
  j["relative_improvement"] = FormatProb(c.relative_improvement);
  j["laplace_mass_within_4_ok"] = c.laplace_mass_within_4_ok;
  return j;
}

absl::StatusOr<GroupInstance> ParseInstance(std::string_view text) {
  const Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("instance: malformed JSON");
  if (!doc.is_object()) return ParseError("instance", "expected an object");
  GroupInstance out;
  if (auto id = doc.find("parent_id"); id != doc.end()) {
    if (!id->is_string()) return ParseError("parent_id", "expected a string");
    out.parent_id = id->get<std::string>();
  }
  for (const char* key : {"invariant", "parent_published"}) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) continue;
    absl::StatusOr<int64_t> v = ReadCount(*it, key);
    if (!v.ok()) return v.status();
    (std::string_view(key) == "invariant" ? out.invariant : out.parent_published) = *v;
  }
  auto kids = doc.find("children");
  if (kids == doc.end() || !kids->is_array()) {
    return ParseError("instance", "missing array field 'children'");
  }
  for (size_t i = 0; i < kids->size(); ++i) {
    absl::StatusOr<ChildNode> child = ReadNode((*kids)[i], absl::StrCat("children[", i, "]"));
    if (!child.ok()) return child.status();
    out.children.push_back(*std::move(child));
  }
  return out;
}

std::string SerializeInstance(const GroupInstance& instance) {
  Json j;
  j["parent_id"] = instance.parent_id;
  if (instance.invariant.has_value()) j["invariant"] = *instance.invariant;
  if (instance.parent_published.has_value()) {
    j["parent_published"] = *instance.parent_published;
  }
  Json kids = Json::array();
  for (const ChildNode& c : instance.children) kids.push_back(NodeToJson(c));
  j["children"] = std::move(kids);
  return j.dump(2);
}

}  // namespace unround
