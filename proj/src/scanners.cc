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

#include "unround/scanners.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace unround {
namespace {

bool AllAtLeastFloor(std::span<const int64_t> values) {
  return std::all_of(values.begin(), values.end(),
                     [](int64_t v) { return v >= kFloor; });
}

int64_t Sum(std::span<const int64_t> values) {
  return std::accumulate(values.begin(), values.end(), int64_t{0});
}

Distribution PointMass(int64_t v) { return {{v, 1.0}}; }

// {bound: p_bound, bound -+ 1 (one step inside the interval): 1 - p_bound}.
Distribution NearBound(int64_t bound, int64_t inward, double p_bound) {
  return {{bound, p_bound}, {bound + inward, 1.0 - p_bound}};
}

double MaxProbability(const Distribution& d) {
  double m = 0.0;
  for (const auto& [v, p] : d) m = std::max(m, p);
  return m;
}

void SetConfidence(GroupInference& inference) {
  double c = 1.0;
  if (inference.parent) c = std::min(c, MaxProbability(*inference.parent));
  for (const Distribution& d : inference.children) c = std::min(c, MaxProbability(d));
  inference.confidence = c;
}

}  // namespace

const char* KindName(FindingKind kind) {
  switch (kind) {
    case FindingKind::kExactInvariant:
      return "exact_invariant";
    case FindingKind::kExactInvariantFree:
      return "exact_invariant_free";
    case FindingKind::kProbInvariant:
      return "prob_invariant";
    case FindingKind::kProbInvariantFree:
      return "prob_invariant_free";
  }
  return "unknown";
}

std::optional<FindingKind> ParseKind(std::string_view name) {
  for (FindingKind k : kAllKinds) {
    if (std::string_view(KindName(k)) == name) return k;
  }
  return std::nullopt;
}

bool IsExact(FindingKind kind) {
  return kind == FindingKind::kExactInvariant ||
         kind == FindingKind::kExactInvariantFree;
}

const char* DirectionName(Direction d) {
  return d == Direction::kUpper ? "upper" : "lower";
}

std::optional<GroupInference> ScanExactInvariant(int64_t invariant,
                                                 std::span<const int64_t> published) {
  const int64_t n = static_cast<int64_t>(published.size());
  if (n < 2 || !AllAtLeastFloor(published)) return std::nullopt;
  const int64_t excess = Sum(published) - invariant;
  if (excess != 4 * n && excess != -4 * n) return std::nullopt;
  const bool lower = excess > 0;
  GroupInference out{FindingKind::kExactInvariant,
                     lower ? Direction::kLower : Direction::kUpper, std::nullopt, {}, 1.0};
  for (int64_t v : published) out.children.push_back(PointMass(lower ? v - 4 : v + 4));
  return out;
}

std::optional<GroupInference> ScanExactInvariantFree(
    int64_t parent_published, std::span<const int64_t> published) {
  if (published.size() != 4 || parent_published < kFloor ||
      !AllAtLeastFloor(published)) {
    return std::nullopt;
  }
  const int64_t excess = Sum(published) - parent_published;
  if (excess != 20 && excess != -20) return std::nullopt;
  const bool lower = excess > 0;
  GroupInference out{FindingKind::kExactInvariantFree,
                     lower ? Direction::kLower : Direction::kUpper,
                     PointMass(lower ? parent_published + 4 : parent_published - 4),
                     {},
                     1.0};
  for (int64_t v : published) out.children.push_back(PointMass(lower ? v - 4 : v + 4));
  return out;
}

std::optional<GroupInference> ScanProbInvariant(int64_t invariant,
                                                std::span<const int64_t> published) {
  const int64_t n = static_cast<int64_t>(published.size());
  if (n < 2 || !AllAtLeastFloor(published)) return std::nullopt;
  const int64_t excess = Sum(published) - invariant;
  if (excess != 4 * n - 1 && excess != -(4 * n - 1)) return std::nullopt;
  // n equally likely solutions: all children at the bound except one, which
  // sits one step inside it.
  const bool lower = excess > 0;
  const double p_bound = static_cast<double>(n - 1) / static_cast<double>(n);
  GroupInference out{FindingKind::kProbInvariant,
                     lower ? Direction::kLower : Direction::kUpper, std::nullopt, {}, 0.0};
  for (int64_t v : published) {
    out.children.push_back(lower ? NearBound(v - 4, +1, p_bound)
                                 : NearBound(v + 4, -1, p_bound));
  }
  SetConfidence(out);
  return out;
}

std::optional<GroupInference> ScanProbInvariantFree(
    int64_t parent_published, std::span<const int64_t> published) {
  if (published.size() != 3 || parent_published < kFloor ||
      !AllAtLeastFloor(published)) {
    return std::nullopt;
  }
  const int64_t excess = Sum(published) - parent_published;
  if (excess != 15 && excess != -15) return std::nullopt;
  // Four equally likely solutions: either the parent is one step inside its
  // bound, or exactly one child is.
  const bool lower = excess > 0;
  GroupInference out{FindingKind::kProbInvariantFree,
                     lower ? Direction::kLower : Direction::kUpper,
                     lower ? NearBound(parent_published + 4, -1, 0.75)
                           : NearBound(parent_published - 4, +1, 0.75),
                     {},
                     0.0};
  for (int64_t v : published) {
    out.children.push_back(lower ? NearBound(v - 4, +1, 0.75)
                                 : NearBound(v + 4, -1, 0.75));
  }
  SetConfidence(out);
  return out;
}

absl::Status VerifyInference(const GroupInference& inference,
                             std::optional<int64_t> invariant,
                             std::optional<int64_t> parent_published,
                             std::span<const int64_t> published) {
  const GroupInstance instance = MakeInstance(
      invariant, parent_published, std::vector<int64_t>(published.begin(), published.end()));
  absl::StatusOr<SolutionSpace> space = Enumerate(instance);
  if (!space.ok()) return space.status();

  std::vector<const Distribution*> expected;
  if (parent_published.has_value()) {
    if (!inference.parent.has_value()) {
      return absl::InternalError("inference lacks a parent distribution");
    }
    expected.push_back(&*inference.parent);
  }
  for (const Distribution& d : inference.children) expected.push_back(&d);
  if (expected.size() != space->attribute_ids.size()) {
    return absl::InternalError("inference and enumeration disagree on attributes");
  }

  const size_t expected_solutions =
      IsExact(inference.kind) ? 1
      : inference.kind == FindingKind::kProbInvariant ? published.size()
                                                       : 4;
  if (space->solutions.size() != expected_solutions) {
    return absl::InternalError(absl::StrCat(
        KindName(inference.kind), ": enumerator found ", space->solutions.size(),
        " solutions, expected ", expected_solutions));
  }
  for (const Solution& s : space->solutions) {
    if (s.likelihood_numerator != space->solutions.front().likelihood_numerator) {
      return absl::InternalError("enumerated solutions are not equally likely");
    }
  }
  for (size_t i = 0; i < expected.size(); ++i) {
    const Distribution& want = *expected[i];
    const Marginal& got = space->marginals[i];
    if (want.size() != got.size()) {
      return absl::InternalError(absl::StrCat("support mismatch on attribute ",
                                              space->attribute_ids[i]));
    }
    for (const auto& [value, p] : want) {
      auto it = got.find(value);
      if (it == got.end() || std::abs(it->second - p) > 1e-9) {
        return absl::InternalError(absl::StrCat("probability mismatch on attribute ",
                                                space->attribute_ids[i], " value ", value));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ScanResult> ScanRegion(const RegionTable& table,
                                      const HierarchySchema& schema,
                                      const ScanOptions& options) {
  ScanResult result;
  auto enabled = [&](FindingKind k) {
    return options.kinds.empty() ||
           std::find(options.kinds.begin(), options.kinds.end(), k) != options.kinds.end();
  };
  if (table.suppressed) {
    result.skipped.push_back({table.region_id, "", "region suppressed"});
    return result;
  }

  for (const PartitionGroup& group : schema.groups()) {
    auto skip = [&](std::string reason) {
      result.skipped.push_back({table.region_id, group.parent, std::move(reason)});
    };
    if (!group.exclusive_exhaustive) {
      skip("group is not exclusive and exhaustive");
      continue;
    }
    const bool invariant_parent = schema.IsInvariant(group.parent);
    const bool wants_invariant =
        enabled(FindingKind::kExactInvariant) || enabled(FindingKind::kProbInvariant);
    const bool wants_free =
        enabled(FindingKind::kExactInvariantFree) || enabled(FindingKind::kProbInvariantFree);
    if ((invariant_parent && !wants_invariant) || (!invariant_parent && !wants_free)) {
      continue;
    }

    const std::optional<int64_t> parent = table.Get(group.parent);
    if (!parent.has_value()) {
      skip(absl::StrCat("missing value for '", group.parent, "'"));
      continue;
    }
    std::vector<int64_t> published;
    std::string missing;
    for (const AttributeId& child : group.children) {
      const std::optional<int64_t> v = table.Get(child);
      if (!v.has_value()) {
        missing = child;
        break;
      }
      published.push_back(*v);
    }
    if (!missing.empty()) {
      skip(absl::StrCat("missing value for '", missing, "'"));
      continue;
    }

    const size_t n = group.children.size();
    if (invariant_parent && n < 2) {
      skip("fewer than 2 children");
      continue;
    }
    if (!invariant_parent && n != 3 && n != 4) {
      skip(absl::StrCat("wrong child count (", n, ") for invariant-free scanning"));
      continue;
    }
    std::string floor_violation;
    if (!invariant_parent && *parent < kFloor) floor_violation = group.parent;
    for (size_t i = 0; i < n && floor_violation.empty(); ++i) {
      if (published[i] < kFloor) floor_violation = group.children[i];
    }
    if (!floor_violation.empty()) {
      skip(absl::StrCat("floor rule: '", floor_violation, "' published ",
                        *table.Get(floor_violation), " < ", kFloor));
      continue;
    }

    std::vector<GroupInference> hits;
    for (FindingKind kind : kAllKinds) {
      if (!enabled(kind)) continue;
      std::optional<GroupInference> hit;
      switch (kind) {
        case FindingKind::kExactInvariant:
          if (invariant_parent) hit = ScanExactInvariant(*parent, published);
          break;
        case FindingKind::kExactInvariantFree:
          if (!invariant_parent && n == 4) hit = ScanExactInvariantFree(*parent, published);
          break;
        case FindingKind::kProbInvariant:
          if (invariant_parent) hit = ScanProbInvariant(*parent, published);
          break;
        case FindingKind::kProbInvariantFree:
          if (!invariant_parent && n == 3) hit = ScanProbInvariantFree(*parent, published);
          break;
      }
      if (hit.has_value()) hits.push_back(std::move(*hit));
    }
    // The four conditions are pairwise exclusive for a fixed group.
    assert(hits.size() <= 1);

    for (GroupInference& hit : hits) {
      bool feasible = true;
      auto check = [&](const Distribution& d) {
        for (const auto& [v, p] : d) feasible = feasible && v >= 0;
      };
      if (hit.parent) check(*hit.parent);
      for (const Distribution& d : hit.children) check(d);
      if (!feasible) {
        result.warnings.push_back(absl::StrCat(
            "region ", table.region_id, " group ", group.parent, ": ",
            KindName(hit.kind), " inference below zero; published data inconsistent"));
        continue;
      }
      if (options.verify) {
        absl::Status s = VerifyInference(
            hit, invariant_parent ? parent : std::nullopt,
            invariant_parent ? std::nullopt : parent, published);
        if (!s.ok()) {
          return absl::InternalError(absl::StrCat("verify failed for region ",
                                                  table.region_id, " group ",
                                                  group.parent, ": ", s.message()));
        }
      }
      Finding f{table.region_id, group.parent, group.children, hit.kind,
                hit.direction, hit.confidence, {}};
      if (hit.parent) f.distributions.emplace_back(group.parent, std::move(*hit.parent));
      for (size_t i = 0; i < n; ++i) {
        f.distributions.emplace_back(group.children[i], std::move(hit.children[i]));
      }
      result.findings.push_back(std::move(f));
    }
  }
  return result;
}

}  // namespace unround
