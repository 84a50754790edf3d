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

#include "unround/utility_analysis.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "unround/kernels.h"

namespace unround {

std::array<ResidueRow, 5> RroundResidueTable() {
  std::array<ResidueRow, 5> rows;
  for (int r = 0; r < 5; ++r) {
    const int64_t x = 10 + r;
    int numerator = 0;  // sum of k * |offset| over outcomes of probability k/5
    for (const RoundingOutcome& o : RroundPmf(x)) {
      numerator += o.probability.numerator * static_cast<int>(std::abs(o.value - x));
    }
    rows[r].residue = r;
    rows[r].sample_probability = 0.2;
    rows[r].distance = numerator / 5.0;
    rows[r].weighted_distance = numerator / 25.0;
  }
  return rows;
}

double RroundExpectedDistance() {
  // Accumulate in 25ths so the result is a single exact division.
  int numerator = 0;
  for (int r = 0; r < 5; ++r) {
    const int64_t x = 10 + r;
    for (const RoundingOutcome& o : RroundPmf(x)) {
      numerator += o.probability.numerator * static_cast<int>(std::abs(o.value - x));
    }
  }
  return numerator / 25.0;
}

DlapDistance DlapExpectedDistance(const DiscreteLaplaceParams& params,
                                  int truncation_radius) {
  assert(truncation_radius >= 10);
  const double t = params.t;
  const double q = std::exp(-1.0 / t);
  const double c = DlapNormalizer(t);
  DlapDistance d;
  d.radius = truncation_radius;
  for (int k = 1; k <= truncation_radius; ++k) {
    d.truncated += 2.0 * k * DlapPmf(k, params);
  }
  d.closed_form = 2.0 * c * q / ((1.0 - q) * (1.0 - q));
  // sum_{k > R} k q^k = q^{R+1} ((R+1)(1-q) + q) / (1-q)^2
  const double r1 = truncation_radius + 1.0;
  d.tail = 2.0 * c * std::pow(q, r1) * (r1 * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
  return d;
}

double DlapMassWithin(double t, int radius) {
  const DiscreteLaplaceParams params{t, false};
  double mass = DlapPmf(0, params);
  for (int k = 1; k <= radius; ++k) mass += 2.0 * DlapPmf(k, params);
  return mass;
}

const char* UtilityMethodName(UtilityMethod m) {
  switch (m) {
    case UtilityMethod::kExactEnumeration:
      return "exact_enumeration";
    case UtilityMethod::kTruncatedSeries:
      return "truncated_series";
    case UtilityMethod::kSampled:
      return "sampled";
  }
  return "unknown";
}

UtilityComparison Compare(const DiscreteLaplaceParams& params) {
  UtilityComparison out;
  out.rround.mechanism = "random_rounding";
  out.rround.method = UtilityMethod::kExactEnumeration;
  out.rround.expected_abs_distance = RroundExpectedDistance();
  out.rround.closed_form_distance = out.rround.expected_abs_distance;
  for (int radius = 1; radius <= 10; ++radius) {
    // Residue-averaged P[|rround(x) - x| <= radius].
    int numerator = 0;
    for (int r = 0; r < 5; ++r) {
      const int64_t x = 10 + r;
      for (const RoundingOutcome& o : RroundPmf(x)) {
        if (std::abs(o.value - x) <= radius) numerator += o.probability.numerator;
      }
    }
    out.rround.mass_within[radius] = numerator / 25.0;
  }

  const DlapDistance d = DlapExpectedDistance(params, 10);
  out.laplace.mechanism = absl::StrFormat("discrete_laplace(t=%g)", params.t);
  out.laplace.method = UtilityMethod::kTruncatedSeries;
  out.laplace.expected_abs_distance = d.truncated;
  out.laplace.closed_form_distance = d.closed_form;
  for (int radius = 1; radius <= 10; ++radius) {
    out.laplace.mass_within[radius] = DlapMassWithin(params.t, radius);
  }

  out.relative_improvement = 1.0 - d.closed_form / out.rround.expected_abs_distance;
  out.laplace_closer = d.closed_form < out.rround.expected_abs_distance;
  out.laplace_mass_within_4_ok = out.laplace.mass_within[4] >= 0.95;
  return out;
}

UtilityReport EmpiricalLaplaceUtility(const DiscreteLaplaceParams& params,
                                      int64_t true_value, uint64_t draws, Rng& rng) {
  UtilityReport report;
  report.mechanism = absl::StrFormat("discrete_laplace(t=%g%s)", params.t,
                                     params.clamp_at_zero ? ", clamped" : "");
  report.method = UtilityMethod::kSampled;
  std::array<uint64_t, 11> within{};
  double total = 0;
  for (uint64_t i = 0; i < draws; ++i) {
    const int64_t distance = std::abs(DlapSample(true_value, params, rng) - true_value);
    total += static_cast<double>(distance);
    for (int64_t r = std::max<int64_t>(distance, 1); r <= 10; ++r) ++within[r];
  }
  const double n = static_cast<double>(std::max<uint64_t>(draws, 1));
  report.expected_abs_distance = total / n;
  for (int r = 1; r <= 10; ++r) report.mass_within[r] = within[r] / n;
  return report;
}

double EmpiricalRroundDistance(int64_t low, int64_t high, uint64_t draws, Rng& rng) {
  constexpr uint64_t kBatch = 1 << 16;
  std::vector<uint32_t> truth, words, out;
  uint64_t total = 0;
  for (uint64_t done = 0; done < draws; done += kBatch) {
    const size_t m = static_cast<size_t>(std::min(kBatch, draws - done));
    truth.resize(m);
    words.resize(m);
    out.resize(m);
    for (uint32_t& v : truth) v = static_cast<uint32_t>(rng.UniformInt(low, high));
    rng.FillWords(words);
    kernels::RroundBatch(truth, words, out);
    total += kernels::AbsDiffSum(truth, out);
  }
  return static_cast<double>(total) / static_cast<double>(std::max<uint64_t>(draws, 1));
}

std::string RenderSignedDistancePmfs(const DiscreteLaplaceParams& params, int radius,
                                     int bar_width) {
  std::vector<double> rround(2 * radius + 1, 0.0);
  for (int r = 0; r < 5; ++r) {
    const int64_t x = 10 + r;
    for (const RoundingOutcome& o : RroundPmf(x)) {
      const int64_t offset = o.value - x;
      if (std::abs(offset) <= radius) {
        rround[offset + radius] += 0.2 * o.probability.value();
      }
    }
  }
  std::vector<double> laplace(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) laplace[k + radius] = DlapPmf(k, params);

  auto render = [&](const std::string& title, const std::vector<double>& pmf) {
    const double peak = *std::max_element(pmf.begin(), pmf.end());
    std::string s = absl::StrCat(title, "\n");
    for (int k = -radius; k <= radius; ++k) {
      const double p = pmf[k + radius];
      const int len = peak > 0 ? static_cast<int>(p / peak * bar_width + 0.5) : 0;
      absl::StrAppend(&s, absl::StrFormat("%+4d | %-*s %.4f\n", k, bar_width,
                                          std::string(len, '#'), p));
    }
    return s;
  };
  return absl::StrCat(render("random rounding: published - true", rround), "\n",
                      render(absl::StrFormat("discrete laplace (t=%g): published - true",
                                             params.t),
                             laplace));
}

}  // namespace unround
