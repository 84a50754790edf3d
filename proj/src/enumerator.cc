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

#include "unround/enumerator.h"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "unround/mechanisms.h"

namespace unround {
namespace {

using u128 = unsigned __int128;

struct Variable {
  AttributeId id;
  std::optional<int64_t> published;  // unset for a fixed invariant
  Interval range;                    // effective range after sum tightening
  int member_of = -1;                // constraint this variable is summed into
  int position = -1;                 // index within that constraint's members
};

// target == sum of members. The target is a variable index, or a constant
// when target_var < 0.
struct SumConstraint {
  int target_var = -1;
  int64_t constant = 0;
  std::vector<int> members;
  // suffix_lo[i] / suffix_hi[i]: bounds on the sum of members[i..].
  std::vector<int64_t> suffix_lo;
  std::vector<int64_t> suffix_hi;
};

struct Problem {
  std::vector<Variable> vars;
  std::vector<SumConstraint> constraints;
};

absl::Status CheckPublished(const AttributeId& id, int64_t v) {
  if (v < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("attribute '", id, "': negative published value ", v));
  }
  if (v % 5 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "attribute '", id, "': published value ", v, " is not a multiple of 5"));
  }
  return absl::OkStatus();
}

// Flattens the instance tree breadth-first so every sum target precedes its
// members.
absl::StatusOr<Problem> Flatten(const GroupInstance& instance) {
  if (instance.invariant.has_value() && instance.parent_published.has_value()) {
    return absl::InvalidArgumentError(
        "instance has both an invariant and a published parent");
  }
  if (instance.children.empty()) {
    return absl::InvalidArgumentError("instance has no children");
  }
  if (instance.invariant.has_value() && *instance.invariant < 0) {
    return absl::InvalidArgumentError("negative invariant");
  }

  Problem p;
  std::set<AttributeId> ids;
  auto add_var = [&](const AttributeId& id,
                     std::optional<int64_t> published) -> absl::StatusOr<int> {
    if (id.empty()) return absl::InvalidArgumentError("empty attribute id");
    if (!ids.insert(id).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate attribute id '", id, "'"));
    }
    Variable v;
    v.id = id;
    v.published = published;
    if (published.has_value()) {
      if (absl::Status s = CheckPublished(id, *published); !s.ok()) return s;
      v.range = TrueValueBounds(*published);
    }
    p.vars.push_back(std::move(v));
    return static_cast<int>(p.vars.size()) - 1;
  };

  int root_target = -1;
  if (instance.parent_published.has_value()) {
    auto idx = add_var(instance.parent_id, instance.parent_published);
    if (!idx.ok()) return idx.status();
    root_target = *idx;
  }

  // Queue of (children list, target var or -1, constant target if any).
  struct Pending {
    const std::vector<ChildNode>* children;
    int target_var;
    std::optional<int64_t> constant;
  };
  std::vector<Pending> queue;
  queue.push_back({&instance.children, root_target, instance.invariant});
  for (size_t q = 0; q < queue.size(); ++q) {
    const Pending pending = queue[q];
    const bool constrained = pending.target_var >= 0 || pending.constant.has_value();
    int constraint_index = -1;
    if (constrained) {
      SumConstraint c;
      c.target_var = pending.target_var;
      c.constant = pending.constant.value_or(0);
      p.constraints.push_back(std::move(c));
      constraint_index = static_cast<int>(p.constraints.size()) - 1;
    }
    std::vector<int> added;
    for (const ChildNode& child : *pending.children) {
      auto idx = add_var(child.id, child.published);
      if (!idx.ok()) return idx.status();
      added.push_back(*idx);
      if (constrained) {
        p.vars[*idx].member_of = constraint_index;
        p.vars[*idx].position =
            static_cast<int>(p.constraints[constraint_index].members.size());
        p.constraints[constraint_index].members.push_back(*idx);
      }
    }
    for (size_t i = 0; i < pending.children->size(); ++i) {
      const ChildNode& child = (*pending.children)[i];
      if (!child.children.empty()) {
        queue.push_back({&child.children, added[i], std::nullopt});
      }
    }
  }
  return p;
}

// Intersects each target's range with the achievable sum of its members.
// Members always have larger indices, so one reverse sweep suffices. Returns
// false if some range becomes empty.
bool Tighten(Problem& p) {
  std::vector<int> target_of(p.vars.size(), -1);
  for (size_t c = 0; c < p.constraints.size(); ++c) {
    if (p.constraints[c].target_var >= 0) {
      target_of[p.constraints[c].target_var] = static_cast<int>(c);
    }
  }
  auto member_bounds = [&](SumConstraint& c) {
    const size_t m = c.members.size();
    c.suffix_lo.assign(m + 1, 0);
    c.suffix_hi.assign(m + 1, 0);
    for (size_t i = m; i-- > 0;) {
      c.suffix_lo[i] = c.suffix_lo[i + 1] + p.vars[c.members[i]].range.lo;
      c.suffix_hi[i] = c.suffix_hi[i + 1] + p.vars[c.members[i]].range.hi;
    }
  };
  for (size_t v = p.vars.size(); v-- > 0;) {
    if (target_of[v] < 0) continue;
    SumConstraint& c = p.constraints[target_of[v]];
    member_bounds(c);
    Interval& r = p.vars[v].range;
    r.lo = std::max(r.lo, c.suffix_lo[0]);
    r.hi = std::min(r.hi, c.suffix_hi[0]);
    if (r.lo > r.hi) return false;
  }
  for (SumConstraint& c : p.constraints) {
    if (c.target_var < 0) {
      member_bounds(c);
      if (c.constant < c.suffix_lo[0] || c.constant > c.suffix_hi[0]) return false;
    }
  }
  return true;
}

class Search {
 public:
  explicit Search(Problem& p)
      : p_(p), values_(p.vars.size(), 0), partial_(p.constraints.size(), 0) {}

  void Run(SolutionSpace& out) {
    out_ = &out;
    Visit(0, 1);
  }

 private:
  void Visit(size_t k, uint64_t numerator) {
    if (k == p_.vars.size()) {
      out_->solutions.push_back(Solution{values_, numerator, 0.0});
      return;
    }
    const Variable& var = p_.vars[k];
    int64_t lo = var.range.lo;
    int64_t hi = var.range.hi;
    if (var.member_of >= 0) {
      const SumConstraint& c = p_.constraints[var.member_of];
      const int64_t target = c.target_var >= 0 ? values_[c.target_var] : c.constant;
      const int64_t remaining = target - partial_[var.member_of];
      lo = std::max(lo, remaining - c.suffix_hi[var.position + 1]);
      hi = std::min(hi, remaining - c.suffix_lo[var.position + 1]);
    }
    for (int64_t v = lo; v <= hi; ++v) {
      values_[k] = v;
      uint64_t next = numerator;
      if (var.published.has_value()) {
        next *= static_cast<uint64_t>(RroundObservationFifths(v, *var.published).numerator);
      }
      if (var.member_of >= 0) partial_[var.member_of] += v;
      Visit(k + 1, next);
      if (var.member_of >= 0) partial_[var.member_of] -= v;
    }
  }

  Problem& p_;
  std::vector<int64_t> values_;
  std::vector<int64_t> partial_;
  SolutionSpace* out_ = nullptr;
};

void CollectIds(const std::vector<ChildNode>& nodes,
                std::vector<std::pair<AttributeId, int64_t>>& out) {
  for (const ChildNode& n : nodes) {
    out.emplace_back(n.id, n.published);
    CollectIds(n.children, out);
  }
}

}  // namespace

GroupInstance MakeInstance(std::optional<int64_t> invariant,
                           std::optional<int64_t> parent_published,
                           const std::vector<int64_t>& children_published) {
  GroupInstance instance;
  instance.invariant = invariant;
  instance.parent_published = parent_published;
  for (size_t i = 0; i < children_published.size(); ++i) {
    instance.children.push_back(
        ChildNode{absl::StrCat("C", i + 1), children_published[i], {}});
  }
  return instance;
}

uint64_t RawAssignmentBound(const GroupInstance& instance) {
  std::vector<std::pair<AttributeId, int64_t>> rounded;
  if (instance.parent_published.has_value()) {
    rounded.emplace_back(instance.parent_id, *instance.parent_published);
  }
  CollectIds(instance.children, rounded);
  u128 bound = 1;
  constexpr u128 kMax = std::numeric_limits<uint64_t>::max();
  for (const auto& [id, published] : rounded) {
    bound *= static_cast<u128>(std::max<int64_t>(1, TrueValueBounds(published).width()));
    if (bound > kMax) return std::numeric_limits<uint64_t>::max();
  }
  return static_cast<uint64_t>(bound);
}

std::optional<size_t> SolutionSpace::IndexOf(const AttributeId& id) const {
  auto it = std::find(attribute_ids.begin(), attribute_ids.end(), id);
  if (it == attribute_ids.end()) return std::nullopt;
  return static_cast<size_t>(it - attribute_ids.begin());
}

const Marginal* SolutionSpace::MarginalFor(const AttributeId& id) const {
  const std::optional<size_t> i = IndexOf(id);
  if (!i.has_value() || *i >= marginals.size()) return nullptr;
  return &marginals[*i];
}

absl::StatusOr<SolutionSpace> Enumerate(const GroupInstance& instance,
                                        const EnumerateOptions& options) {
  absl::StatusOr<Problem> problem = Flatten(instance);
  if (!problem.ok()) return problem.status();

  const uint64_t bound = RawAssignmentBound(instance);
  if (bound > options.raw_assignment_cap) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "raw assignment bound ", bound, " exceeds cap ", options.raw_assignment_cap));
  }

  SolutionSpace space;
  for (const Variable& v : problem->vars) {
    space.attribute_ids.push_back(v.id);
    if (v.published.has_value()) ++space.rounded_attributes;
  }
  if (!Tighten(*problem)) return space;

  Search(*problem).Run(space);
  if (space.solutions.empty()) return space;

  u128 total = 0;
  for (const Solution& s : space.solutions) total += s.likelihood_numerator;
  const double denominator = static_cast<double>(total);
  for (Solution& s : space.solutions) {
    s.probability = static_cast<double>(s.likelihood_numerator) / denominator;
  }
  space.normalized = true;
  space.marginals = Marginals(space);
  return space;
}

std::vector<Marginal> Marginals(const SolutionSpace& space) {
  const size_t n = space.attribute_ids.size();
  std::vector<std::map<int64_t, u128>> mass(n);
  u128 total = 0;
  for (const Solution& s : space.solutions) {
    total += s.likelihood_numerator;
    for (size_t i = 0; i < n; ++i) mass[i][s.values[i]] += s.likelihood_numerator;
  }
  std::vector<Marginal> out(n);
  if (total == 0) return out;
  const double denominator = static_cast<double>(total);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& [value, m] : mass[i]) {
      out[i][value] = static_cast<double>(m) / denominator;
    }
  }
  return out;
}

std::vector<RankedSolution> TopK(const SolutionSpace& space, size_t k) {
  std::vector<const Solution*> order;
  order.reserve(space.solutions.size());
  for (const Solution& s : space.solutions) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const Solution* a, const Solution* b) {
    if (a->likelihood_numerator != b->likelihood_numerator) {
      return a->likelihood_numerator > b->likelihood_numerator;
    }
    return a->values < b->values;
  });
  std::vector<RankedSolution> out;
  for (size_t i = 0; i < std::min(k, order.size()); ++i) {
    out.push_back({order[i]->values, order[i]->probability});
  }
  return out;
}

CredibleSet CredibleInterval(const Marginal& marginal, double mass) {
  std::vector<std::pair<int64_t, double>> entries(marginal.begin(), marginal.end());
  // Map order is ascending by value, so a stable sort keeps smaller values
  // first among equal probabilities.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  CredibleSet set;
  constexpr double kSlack = 1e-12;
  for (const auto& [value, p] : entries) {
    if (set.achieved_mass + kSlack >= mass && !set.values.empty()) break;
    set.values.push_back(value);
    set.achieved_mass += p;
  }
  std::sort(set.values.begin(), set.values.end());
  return set;
}

std::string RenderHistogram(const AttributeId& id, const Marginal& marginal,
                            int bar_width) {
  std::string out = absl::StrCat(id, "\n");
  double peak = 0.0;
  for (const auto& [v, p] : marginal) peak = std::max(peak, p);
  for (const auto& [value, p] : marginal) {
    const int len = peak > 0 ? static_cast<int>(p / peak * bar_width + 0.5) : 0;
    absl::StrAppend(&out, absl::StrFormat("%8d | %-*s %.4f\n", value, bar_width,
                                          std::string(len, '#'), p));
  }
  return out;
}

}  // namespace unround
