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

#include <cmath>

#include "gtest/gtest.h"
#include "unround/kernels.h"

namespace unround {
namespace {

TEST(AnalyticRateTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(*AnalyticRate({FindingKind::kExactInvariant, 2}), 0.0032);
  EXPECT_NEAR(*AnalyticRate({FindingKind::kExactInvariant, 3}), 1.28e-4, 1e-18);
  EXPECT_NEAR(*AnalyticRate({FindingKind::kExactInvariantFree, 4}), 1.024e-6, 1e-20);
  EXPECT_NEAR(*AnalyticRate({FindingKind::kProbInvariant, 3}), 7.68e-4, 1e-18);
  EXPECT_NEAR(*AnalyticRate({FindingKind::kProbInvariantFree, 3}), 2.048e-4, 1e-18);
}

TEST(AnalyticRateTest, UnsupportedCombinations) {
  EXPECT_FALSE(AnalyticRate({FindingKind::kExactInvariant, 1}).ok());
  EXPECT_FALSE(AnalyticRate({FindingKind::kExactInvariantFree, 3}).ok());
  EXPECT_FALSE(AnalyticRate({FindingKind::kProbInvariantFree, 4}).ok());
}

TEST(ExpectedCountTest, ReferencePopulations) {
  EXPECT_NEAR(*ExpectedCount({FindingKind::kExactInvariant, 2}, 61010), 195.232, 1e-9);
  EXPECT_NEAR(*ExpectedCount({FindingKind::kExactInvariant, 3}, 59625), 7.632, 1e-9);
  EXPECT_NEAR(*ExpectedCount({FindingKind::kExactInvariantFree, 4}, 83898), 0.0859115520, 1e-9);
  EXPECT_NEAR(*ExpectedCount({FindingKind::kProbInvariantFree, 3}, 918192), 188.0457216, 1e-6);
  EXPECT_FALSE(ExpectedCount({FindingKind::kExactInvariant, 2}, -1).ok());
}

TEST(ReferenceRateTableTest, FiveRows) {
  const std::vector<RateRow> rows = ReferenceRateTable();
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(1 / rows[0].rate, 312.5, 1e-9);
  EXPECT_NEAR(1 / rows[2].rate, 976562.5, 1e-6);
  ASSERT_EQ(rows[3].populations.size(), 2u);
  EXPECT_EQ(rows[3].populations[1].groups, 61029);
}

TEST(GenGroupTest, ParentIsExactSumAndInvariantPassesThrough) {
  TrialConfig config;
  config.kind = FindingKind::kExactInvariant;
  config.n = 2;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    absl::StatusOr<SyntheticGroup> g = GenGroup(config, rng);
    ASSERT_TRUE(g.ok());
    EXPECT_EQ(*g->truth.Get("P"), *g->truth.Get("C1") + *g->truth.Get("C2"));
    EXPECT_EQ(g->published.Get("P"), g->truth.Get("P"));
    EXPECT_EQ(*g->published.Get("C1") % 5, 0);
  }
}

TEST(GenGroupTest, InvariantFreeParentIsRounded) {
  TrialConfig config;
  config.kind = FindingKind::kProbInvariantFree;
  config.n = 3;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(*GenGroup(config, rng)->published.Get("P") % 5, 0);
}

TEST(GenGroupTest, SameSeedSameGroup) {
  TrialConfig config;
  Rng a(4), b(4);
  const SyntheticGroup x = *GenGroup(config, a);
  const SyntheticGroup y = *GenGroup(config, b);
  EXPECT_EQ(x.truth, y.truth);
  EXPECT_EQ(x.published, y.published);
}

TEST(GenGroupTest, ResiduesAreUniform) {
  TrialConfig config;
  config.n = 2;
  Rng rng(6);
  std::vector<int> residue(5, 0);
  constexpr int kGroups = 500'000;
  for (int i = 0; i < kGroups; ++i) {
    const SyntheticGroup g = *GenGroup(config, rng);
    ++residue[*g.truth.Get("C1") % 5];
    ++residue[*g.truth.Get("C2") % 5];
  }
  const double n = 2.0 * kGroups;
  for (int c : residue) EXPECT_LT(std::abs(c - n / 5), 3 * std::sqrt(n * 0.2 * 0.8));
}

TEST(TrialConfigTest, Validation) {
  TrialConfig c;
  EXPECT_TRUE(ValidateTrialConfig(c).ok());
  c.truth_low = 10;
  EXPECT_FALSE(ValidateTrialConfig(c).ok());
  c.truth_low = 11;
  c.trials = 0;
  EXPECT_FALSE(ValidateTrialConfig(c).ok());
  c.trials = 1;
  c.truth_high = 5;
  EXPECT_FALSE(ValidateTrialConfig(c).ok());
  c.truth_high = 510;
  c.kind = FindingKind::kExactInvariantFree;
  c.n = 3;
  EXPECT_FALSE(ValidateTrialConfig(c).ok());
}

TEST(RunTrialsTest, IndependentOfThreadCount) {
  TrialConfig c;
  c.kind = FindingKind::kProbInvariant;
  c.n = 2;
  c.trials = 300'000;
  c.seed = 9;
  c.threads = 1;
  const TrialReport one = *RunTrials(c);
  c.threads = 4;
  const TrialReport four = *RunTrials(c);
  EXPECT_EQ(one.fires, four.fires);
  EXPECT_EQ(one.calibration_hits, four.calibration_hits);
  EXPECT_GT(one.fires, 0u);
}

TEST(RunTrialsTest, IndependentOfIsa) {
  TrialConfig c;
  c.kind = FindingKind::kExactInvariant;
  c.n = 2;
  c.trials = 200'000;
  c.seed = 3;
  kernels::SetIsaOverride(kernels::Isa::kScalar);
  const TrialReport scalar = *RunTrials(c);
  kernels::SetIsaOverride(std::nullopt);
  const TrialReport best = *RunTrials(c);
  EXPECT_EQ(scalar.isa, "scalar");
  EXPECT_EQ(scalar.fires, best.fires);
}

TEST(RunTrialsTest, ExactInvariantRateAndSoundness) {
  TrialConfig c;
  c.kind = FindingKind::kExactInvariant;
  c.n = 2;
  c.trials = 1'000'000;
  c.seed = 11;
  const TrialReport r = *RunTrials(c);
  EXPECT_EQ(r.soundness_violations, 0u);
  EXPECT_LE(std::abs(r.z_score), 3.0);
  EXPECT_DOUBLE_EQ(r.empirical_rate, static_cast<double>(r.fires) / 1e6);
  const double p = 0.0032;
  EXPECT_NEAR(r.z_score, (r.fires - 1e6 * p) / std::sqrt(1e6 * p * (1 - p)), 1e-9);
  // Exact fires always reveal the truth.
  EXPECT_EQ(r.calibration_hits, r.fires);
}

TEST(RunTrialsTest, ProbabilisticCalibration) {
  TrialConfig c;
  c.kind = FindingKind::kProbInvariantFree;
  c.n = 3;
  c.trials = 2'000'000;
  c.seed = 12;
  c.truth_high = 60;  // more fires per trial, same residue mix
  const TrialReport r = *RunTrials(c);
  EXPECT_EQ(r.soundness_violations, 0u);
  EXPECT_DOUBLE_EQ(r.claimed_confidence, 0.75);
  EXPECT_LE(std::abs(r.calibration_z), 3.0);
}

}  // namespace
}  // namespace unround
