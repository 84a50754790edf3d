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

#include "unround/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "absl/strings/str_cat.h"
#include "unround/kernels.h"
#include "unround/mechanisms.h"

namespace unround {
namespace {

constexpr uint64_t kChunkTrials = uint64_t{1} << 16;

// 5^-k, computed from an exact integer power.
double FifthPower(int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= 5.0;
  return 1.0 / p;
}

bool IsInvariantKind(FindingKind kind) {
  return kind == FindingKind::kExactInvariant || kind == FindingKind::kProbInvariant;
}

std::optional<GroupInference> Scan(FindingKind kind, int64_t parent,
                                   std::span<const int64_t> children) {
  switch (kind) {
    case FindingKind::kExactInvariant:
      return ScanExactInvariant(parent, children);
    case FindingKind::kExactInvariantFree:
      return ScanExactInvariantFree(parent, children);
    case FindingKind::kProbInvariant:
      return ScanProbInvariant(parent, children);
    case FindingKind::kProbInvariantFree:
      return ScanProbInvariantFree(parent, children);
  }
  return std::nullopt;
}

bool Supports(const Distribution& d, int64_t truth, bool exact) {
  if (exact) return d.size() == 1 && d.begin()->first == truth;
  return d.contains(truth);
}

int64_t Mode(const Distribution& d) {
  auto best = d.begin();
  for (auto it = d.begin(); it != d.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

struct ChunkTally {
  uint64_t fires = 0;
  uint64_t violations = 0;
  uint64_t calibration_hits = 0;
};

ChunkTally RunChunk(const TrialConfig& config, uint64_t chunk, uint64_t trials) {
  Rng rng = Rng::ForStream(config.seed, chunk);
  const bool invariant = IsInvariantKind(config.kind);
  const size_t n = static_cast<size_t>(config.n);
  // Per trial: n children, then the parent (rounded only for free kinds).
  const size_t stride = n + 1;
  const size_t rounded_per_trial = invariant ? n : n + 1;

  std::vector<uint32_t> truth(trials * stride);
  for (uint64_t t = 0; t < trials; ++t) {
    uint32_t* row = &truth[t * stride];
    uint32_t sum = 0;
    for (size_t i = 0; i < n; ++i) {
      row[i] = static_cast<uint32_t>(rng.UniformInt(config.truth_low, config.truth_high));
      sum += row[i];
    }
    row[n] = sum;
  }
  std::vector<uint32_t> words(truth.size());
  rng.FillWords(words);
  std::vector<uint32_t> published(truth.size());
  kernels::RroundBatch(truth, words, published);

  ChunkTally tally;
  const bool exact = IsExact(config.kind);
  std::vector<int64_t> children(n);
  for (uint64_t t = 0; t < trials; ++t) {
    const uint32_t* truth_row = &truth[t * stride];
    const uint32_t* pub_row = &published[t * stride];
    for (size_t i = 0; i < n; ++i) children[i] = pub_row[i];
    const int64_t parent = rounded_per_trial == n ? truth_row[n] : pub_row[n];
    const std::optional<GroupInference> hit = Scan(config.kind, parent, children);
    if (!hit.has_value()) continue;
    ++tally.fires;
    bool sound = true;
    if (hit->parent.has_value()) sound = Supports(*hit->parent, truth_row[n], exact);
    for (size_t i = 0; i < n; ++i) {
      sound = sound && Supports(hit->children[i], truth_row[i], exact);
    }
    if (!sound) ++tally.violations;
    if (Mode(hit->children[0]) == truth_row[0]) ++tally.calibration_hits;
  }
  return tally;
}

double ZScore(double hits, double trials, double p) {
  const double var = trials * p * (1.0 - p);
  if (var <= 0) return 0.0;
  return (hits - trials * p) / std::sqrt(var);
}

}  // namespace

absl::StatusOr<double> AnalyticRate(const AttackRateQuery& q) {
  switch (q.kind) {
    case FindingKind::kExactInvariant:
      if (q.n < 2 || q.n > 13) break;
      return 2.0 * FifthPower(2 * q.n);
    case FindingKind::kExactInvariantFree:
      if (q.n != 4) break;
      return 2.0 * FifthPower(9);
    case FindingKind::kProbInvariant:
      if (q.n < 2 || q.n > 13) break;
      return 2.0 * q.n * FifthPower(2 * q.n - 1) * 0.4;
    case FindingKind::kProbInvariantFree:
      if (q.n != 3) break;
      return 8.0 * FifthPower(6) * 0.4;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unsupported combination: kind ", KindName(q.kind), ", n = ", q.n));
}

absl::StatusOr<double> ExpectedCount(const AttackRateQuery& query,
                                     double population_of_groups) {
  if (population_of_groups < 0) {
    return absl::InvalidArgumentError("population_of_groups must be >= 0");
  }
  absl::StatusOr<double> rate = AnalyticRate(query);
  if (!rate.ok()) return rate.status();
  return *rate * population_of_groups;
}

std::vector<RateRow> ReferenceRateTable() {
  std::vector<RateRow> rows = {
      {"exact, invariant, sex(+) (n=2)",
       {FindingKind::kExactInvariant, 2},
       0,
       {{"sex(+) regions", 61010}},
       285},
      {"exact, invariant, age (n=3)",
       {FindingKind::kExactInvariant, 3},
       0,
       {{"age regions", 59625}},
       18},
      {"exact, invariant-free (4+1)",
       {FindingKind::kExactInvariantFree, 4},
       0,
       {{"4-child groups", 83898}},
       0},
      {"probabilistic, invariant, age (n=3)",
       {FindingKind::kProbInvariant, 3},
       0,
       {{"age regions", 59625}, {"all query-able regions", 61029}},
       83},
      {"probabilistic, invariant-free (3+1)",
       {FindingKind::kProbInvariantFree, 3},
       0,
       {{"3-child groups", 918192}},
       216},
  };
  for (RateRow& row : rows) row.rate = *AnalyticRate(row.query);
  return rows;
}

absl::Status ValidateTrialConfig(const TrialConfig& c) {
  if (c.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (c.truth_low < 11) {
    return absl::InvalidArgumentError("truth_low must be >= 11 (floor rule)");
  }
  if (c.truth_high < c.truth_low) {
    return absl::InvalidArgumentError("truth_high must be >= truth_low");
  }
  if (!AnalyticRate({c.kind, c.n}).ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported n = ", c.n, " for kind ", KindName(c.kind)));
  }
  // Parent sums must fit the 32-bit kernels with headroom for rounding.
  if (c.truth_high > (int64_t{1} << 30) / (c.n + 1)) {
    return absl::InvalidArgumentError("truth_high too large");
  }
  return absl::OkStatus();
}

HierarchySchema SyntheticSchema(FindingKind kind, int n) {
  std::vector<Attribute> attributes = {{"P", "parent"}};
  PartitionGroup group{"P", {}, true};
  for (int i = 1; i <= n; ++i) {
    attributes.push_back({absl::StrCat("C", i), absl::StrCat("child ", i)});
    group.children.push_back(absl::StrCat("C", i));
  }
  std::vector<AttributeId> invariants;
  if (IsInvariantKind(kind)) invariants.push_back("P");
  return *HierarchySchema::Create(std::move(attributes), {group}, std::move(invariants));
}

absl::StatusOr<SyntheticGroup> GenGroup(const TrialConfig& config, Rng& rng) {
  if (absl::Status s = ValidateTrialConfig(config); !s.ok()) return s;
  const HierarchySchema schema = SyntheticSchema(config.kind, config.n);
  SyntheticGroup g;
  g.truth.region_id = "synthetic";
  int64_t sum = 0;
  for (int i = 1; i <= config.n; ++i) {
    const int64_t v = rng.UniformInt(config.truth_low, config.truth_high);
    g.truth.values[absl::StrCat("C", i)] = v;
    sum += v;
  }
  g.truth.values["P"] = sum;
  absl::StatusOr<RegionTable> published =
      ApplyMechanism(g.truth, schema, MechanismSpec{}, rng);
  if (!published.ok()) return published.status();
  g.published = *std::move(published);
  return g;
}

absl::StatusOr<TrialReport> RunTrials(const TrialConfig& config) {
  if (absl::Status s = ValidateTrialConfig(config); !s.ok()) return s;
  const uint64_t chunks = (config.trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<ChunkTally> tallies(chunks);
  std::atomic<uint64_t> next{0};
  auto worker = [&] {
    for (uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      const uint64_t begin = c * kChunkTrials;
      const uint64_t count = std::min(kChunkTrials, config.trials - begin);
      tallies[c] = RunChunk(config, c, count);
    }
  };
  unsigned threads = config.threads != 0 ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<uint64_t>(threads, chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  TrialReport report;
  report.kind = config.kind;
  report.n = config.n;
  report.trials = config.trials;
  report.seed = config.seed;
  report.isa = std::string(kernels::IsaName(kernels::ActiveIsa()));
  for (const ChunkTally& t : tallies) {
    report.fires += t.fires;
    report.soundness_violations += t.violations;
    report.calibration_hits += t.calibration_hits;
  }
  report.analytic_rate = *AnalyticRate({config.kind, config.n});
  const double trials = static_cast<double>(config.trials);
  report.empirical_rate = static_cast<double>(report.fires) / trials;
  report.z_score = ZScore(static_cast<double>(report.fires), trials, report.analytic_rate);
  switch (config.kind) {
    case FindingKind::kProbInvariant:
      report.claimed_confidence = static_cast<double>(config.n - 1) / config.n;
      break;
    case FindingKind::kProbInvariantFree:
      report.claimed_confidence = 0.75;
      break;
    default:
      report.claimed_confidence = 1.0;
      break;
  }
  if (report.fires > 0) {
    const double fires = static_cast<double>(report.fires);
    report.calibration_rate = static_cast<double>(report.calibration_hits) / fires;
    report.calibration_z = ZScore(static_cast<double>(report.calibration_hits), fires,
                                  report.claimed_confidence);
  }
  return report;
}

}  // namespace unround
