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

// JSON encodings of every report the command-line tool emits, plus the
// enumerate instance format.
//
// Probabilities are written as decimal strings with 15 significant digits so
// that consumers never see a binary-float round trip. Keys keep insertion
// order, so output is byte-stable.

#ifndef UNROUND_JSON_REPORT_H_
#define UNROUND_JSON_REPORT_H_

#include <span>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "unround/enumerator.h"
#include "unround/scanners.h"
#include "unround/simulator.h"
#include "unround/utility_analysis.h"

namespace unround {

using Json = nlohmann::ordered_json;

// "%.15g" rendering of a probability.
std::string FormatProb(double p);

// [{"value": v, "prob": "..."}...] in ascending value order.
Json DistributionToJson(const Distribution& d);

// Array of {region_id, parent, children, kind, direction, confidence,
// distributions: {attr: [{value, prob}...]}}.
Json FindingsToJson(std::span<const Finding> findings);

// {attribute_ids, rounded_attributes, normalized,
//  solutions: [{assignment: {attr: v}, prob}...], marginals: {attr: [...]}}.
// A non-zero top_k keeps only the top_k most likely solutions, in rank order.
Json SolutionSpaceToJson(const SolutionSpace& space, size_t top_k = 0);

Json CredibleSetToJson(const AttributeId& id, double mass, const CredibleSet& set);

Json TrialReportToJson(const TrialReport& report);

Json RateTableToJson(std::span<const RateRow> rows);

Json UtilityReportToJson(const UtilityReport& report);
Json UtilityComparisonToJson(const UtilityComparison& comparison);

// Instance document:
//   {"parent_id": "A0",            optional, default "parent"
//    "invariant": 87,              optional, exclusive with parent_published
//    "parent_published": 30,       optional
//    "children": [{"id": "M", "published": 35, "children": [...]}...]}
absl::StatusOr<GroupInstance> ParseInstance(std::string_view json);
std::string SerializeInstance(const GroupInstance& instance);

}  // namespace unround

#endif  // UNROUND_JSON_REPORT_H_
