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

// Command-line front end. JSON and CSV results go to standard output (or
// --out), human-readable summaries and diagnostics to standard error.
//
// Exit codes: 0 success, 2 input or validation error, 3 verification failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "unround/census_model.h"
#include "unround/enumerator.h"
#include "unround/json_report.h"
#include "unround/kernels.h"
#include "unround/mechanisms.h"
#include "unround/rng.h"
#include "unround/scanners.h"
#include "unround/simulator.h"
#include "unround/utility_analysis.h"

namespace unround {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitVerify = 3;

struct Options {
  std::string schema_path;
  std::string data_path;
  std::string out_path;
  std::string mechanism = "rround";
  double t = 1.45;
  bool clamp = false;
  uint64_t seed = 1;
  std::string kinds;
  bool verify = false;
  bool verbose = false;
  std::string kind = "exact_invariant";
  int n = 2;
  uint64_t trials = 1'000'000;
  int64_t truth_low = 11;
  int64_t truth_high = 510;
  unsigned threads = 0;
  size_t k = 0;
  std::optional<double> mass;
  bool histogram = false;
  uint64_t cap = 10'000'000;
  uint64_t draws = 1'000'000;
  int64_t at = 20;
  std::string isa;
};

int Fail(const absl::Status& status, int code = kExitInput) {
  std::cerr << "error: " << status.message() << "\n";
  return code;
}

absl::StatusOr<std::string> ReadFile(const std::string& path, const char* flag) {
  if (path.empty()) return absl::InvalidArgumentError(absl::StrCat(flag, " is required"));
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Writes the command's primary output to --out, or standard output.
int Emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return kExitOk;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  out << text;
  if (!out) return Fail(absl::InternalError(absl::StrCat("cannot write ", o.out_path)));
  return kExitOk;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

absl::StatusOr<HierarchySchema> LoadSchema(const Options& o) {
  absl::StatusOr<std::string> text = ReadFile(o.schema_path, "--schema");
  if (!text.ok()) return text.status();
  absl::StatusOr<HierarchySchema> schema = ParseHierarchy(*text);
  if (!schema.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(o.schema_path, ": ", std::string(schema.status().message())));
  }
  return schema;
}

absl::StatusOr<std::vector<RegionTable>> LoadTables(const Options& o,
                                                    const HierarchySchema& schema,
                                                    bool published) {
  absl::StatusOr<std::string> text = ReadFile(o.data_path, "--data");
  if (!text.ok()) return text.status();
  TableParseOptions opts;
  opts.published = published;
  absl::StatusOr<std::vector<RegionTable>> tables = ParseTable(*text, schema, opts);
  if (!tables.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(o.data_path, ": ", std::string(tables.status().message())));
  }
  return tables;
}

// Prints every violation and reports whether there were any.
bool ReportViolations(std::span<const RegionTable> tables, const HierarchySchema& schema) {
  bool any = false;
  for (const RegionTable& t : tables) {
    for (const Violation& v : ValidateTrueTable(t, schema)) {
      std::cerr << "region " << t.region_id << ": " << v.message << "\n";
      any = true;
    }
  }
  return any;
}

int CmdRound(const Options& o) {
  absl::StatusOr<HierarchySchema> schema = LoadSchema(o);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<std::vector<RegionTable>> truth = LoadTables(o, *schema, false);
  if (!truth.ok()) return Fail(truth.status());
  if (ReportViolations(*truth, *schema)) {
    return Fail(absl::InvalidArgumentError("true table failed validation"));
  }
  MechanismSpec spec;
  if (o.mechanism == "dlap") {
    spec.kind = MechanismSpec::Kind::kDiscreteLaplace;
    spec.laplace = {o.t, o.clamp};
  } else if (o.mechanism != "rround") {
    return Fail(absl::InvalidArgumentError(
        absl::StrCat("unknown mechanism '", o.mechanism, "' (want rround or dlap)")));
  }
  // One stream per region keeps a region's output independent of its
  // position in the file.
  std::vector<RegionTable> published;
  for (size_t i = 0; i < truth->size(); ++i) {
    Rng rng = Rng::ForStream(o.seed, i);
    absl::StatusOr<RegionTable> p = ApplyMechanism((*truth)[i], *schema, spec, rng);
    if (!p.ok()) return Fail(p.status());
    published.push_back(*std::move(p));
  }
  std::cerr << "rounded " << published.size() << " region(s) with " << o.mechanism
            << ", seed " << o.seed << "\n";
  return Emit(o, SerializeTables(published));
}

absl::StatusOr<std::vector<FindingKind>> ParseKinds(const std::string& list) {
  std::vector<FindingKind> kinds;
  if (list.empty() || list == "all") return kinds;
  for (absl::string_view piece : absl::StrSplit(list, ',', absl::SkipEmpty())) {
    const std::string name(piece);
    std::optional<FindingKind> kind = ParseKind(name);
    if (!kind.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown kind '", name, "'"));
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

int CmdScan(const Options& o) {
  absl::StatusOr<HierarchySchema> schema = LoadSchema(o);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<std::vector<RegionTable>> tables = LoadTables(o, *schema, true);
  if (!tables.ok()) return Fail(tables.status());
  absl::StatusOr<std::vector<FindingKind>> kinds = ParseKinds(o.kinds);
  if (!kinds.ok()) return Fail(kinds.status());
  ScanOptions options{*kinds, o.verify};

  std::vector<Finding> findings;
  size_t skipped = 0;
  for (const RegionTable& t : *tables) {
    absl::StatusOr<ScanResult> r = ScanRegion(t, *schema, options);
    if (!r.ok()) {
      if (r.status().code() == absl::StatusCode::kInternal) return Fail(r.status(), kExitVerify);
      return Fail(r.status());
    }
    for (const std::string& w : r->warnings) std::cerr << "warning: " << w << "\n";
    if (o.verbose) {
      for (const SkippedGroup& s : r->skipped) {
        std::cerr << "skipped " << s.region_id << (s.parent.empty() ? "" : "/") << s.parent
                  << ": " << s.reason << "\n";
      }
    }
    skipped += r->skipped.size();
    for (Finding& f : r->findings) findings.push_back(std::move(f));
  }
  std::cerr << "scanned " << tables->size() << " region(s): " << findings.size()
            << " finding(s), " << skipped << " group(s) skipped"
            << (o.verify ? ", all verified" : "") << "\n";
  return Emit(o, Dump(FindingsToJson(findings)));
}

int CmdEnumerate(const Options& o) {
  absl::StatusOr<std::string> text = ReadFile(o.data_path, "--data");
  if (!text.ok()) return Fail(text.status());
  absl::StatusOr<GroupInstance> instance = ParseInstance(*text);
  if (!instance.ok()) return Fail(instance.status());
  absl::StatusOr<SolutionSpace> space = Enumerate(*instance, {o.cap});
  if (!space.ok()) return Fail(space.status());

  Json out = SolutionSpaceToJson(*space, o.k);
  if (o.mass.has_value()) {
    if (*o.mass <= 0 || *o.mass > 1) {
      return Fail(absl::InvalidArgumentError("--mass must be in (0, 1]"));
    }
    Json sets = Json::array();
    if (space->normalized) {
      for (size_t i = 0; i < space->attribute_ids.size(); ++i) {
        sets.push_back(CredibleSetToJson(space->attribute_ids[i], *o.mass,
                                         CredibleInterval(space->marginals[i], *o.mass)));
      }
    }
    out["credible_sets"] = std::move(sets);
  }
  std::cerr << space->solutions.size() << " solution(s) over "
            << space->attribute_ids.size() << " attribute(s)\n";
  if (o.histogram && space->normalized) {
    for (size_t i = 0; i < space->attribute_ids.size(); ++i) {
      std::cerr << RenderHistogram(space->attribute_ids[i], space->marginals[i]) << "\n";
    }
  }
  return Emit(o, Dump(out));
}

int CmdSimulate(const Options& o) {
  std::optional<FindingKind> kind = ParseKind(o.kind);
  if (!kind.has_value()) {
    return Fail(absl::InvalidArgumentError(absl::StrCat("unknown kind '", o.kind, "'")));
  }
  TrialConfig config{*kind, o.n, o.trials, o.truth_low, o.truth_high, o.seed, o.threads};
  absl::StatusOr<TrialReport> report = RunTrials(config);
  if (!report.ok()) return Fail(report.status());
  std::cerr << absl::StrFormat(
      "%s n=%d: %d fires in %d trials, rate %.6g vs analytic %.6g (z = %+.3f), "
      "%d soundness violations",
      KindName(report->kind), report->n, report->fires, report->trials,
      report->empirical_rate, report->analytic_rate, report->z_score,
      report->soundness_violations);
  if (!IsExact(report->kind)) {
    std::cerr << absl::StrFormat(", modal hit rate %.4f vs claimed %.4f (z = %+.3f)",
                                 report->calibration_rate, report->claimed_confidence,
                                 report->calibration_z);
  }
  std::cerr << "\n";
  return Emit(o, Dump(TrialReportToJson(*report)));
}

int CmdRates(const Options& o) {
  const std::vector<RateRow> rows = ReferenceRateTable();
  std::cerr << absl::StrFormat("%-38s %12s %12s  %s\n", "attack", "rate", "one in",
                               "expected count (population)");
  for (const RateRow& row : rows) {
    std::string expected;
    for (const RatePopulation& p : row.populations) {
      absl::StrAppend(&expected, expected.empty() ? "" : ", ",
                      absl::StrFormat("%.4g (x%.0f %s)", row.rate * p.groups, p.groups,
                                      p.label));
    }
    std::cerr << absl::StrFormat("%-38s %12.4e %12.1f  %s\n", row.label, row.rate,
                                 1.0 / row.rate, expected);
  }
  return Emit(o, Dump(RateTableToJson(rows)));
}

int CmdUtility(const Options& o) {
  if (!(o.t > 0)) return Fail(absl::InvalidArgumentError("--t must be positive"));
  const DiscreteLaplaceParams params{o.t, false};
  const UtilityComparison c = Compare(params);
  const DlapDistance d = DlapExpectedDistance(params, 10);
  Json out = UtilityComparisonToJson(c);
  out["truncation_tail"] = FormatProb(d.tail);
  if (o.clamp) {
    Rng rng(o.seed);
    const UtilityReport clamped =
        EmpiricalLaplaceUtility({o.t, true}, o.at, o.draws, rng);
    Json j = UtilityReportToJson(clamped);
    j["true_value"] = o.at;
    j["draws"] = o.draws;
    j["seed"] = o.seed;
    out["clamped_laplace"] = std::move(j);
  }
  std::cerr << absl::StrFormat(
      "random rounding: expected |error| %.4f (exact)\n"
      "discrete laplace t=%g: expected |error| %.4f (truncated at 10), %.4f (closed "
      "form), mass within 4 = %.4f\n"
      "laplace is %.1f%% %s\n",
      c.rround.expected_abs_distance, o.t, c.laplace.expected_abs_distance,
      *c.laplace.closed_form_distance, c.laplace.mass_within.at(4),
      std::abs(c.relative_improvement) * 100, c.laplace_closer ? "closer" : "farther");
  if (o.histogram) std::cerr << "\n" << RenderSignedDistancePmfs(params);
  return Emit(o, Dump(out));
}

int CmdValidate(const Options& o) {
  absl::StatusOr<HierarchySchema> schema = LoadSchema(o);
  if (!schema.ok()) return Fail(schema.status());
  absl::StatusOr<std::vector<RegionTable>> tables = LoadTables(o, *schema, false);
  if (!tables.ok()) return Fail(tables.status());
  Json violations = Json::array();
  for (const RegionTable& t : *tables) {
    for (const Violation& v : ValidateTrueTable(t, *schema)) {
      std::cerr << "region " << t.region_id << ": " << v.message << "\n";
      violations.push_back(
          Json{{"region_id", t.region_id}, {"group", v.group_parent}, {"message", v.message}});
    }
  }
  const bool valid = violations.empty();
  Json out{{"regions", tables->size()}, {"valid", valid}, {"violations", violations}};
  if (int rc = Emit(o, Dump(out)); rc != kExitOk) return rc;
  return valid ? kExitOk : kExitInput;
}

int Main(int argc, char** argv) {
  CLI::App app{"Disclosure analysis for randomly rounded census tables"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--isa", o.isa, "Force kernel ISA: scalar, avx2 or neon");

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_path, "Write primary output here instead of stdout");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--schema", o.schema_path, "Hierarchy schema JSON")->required();
    sub->add_option("--data", o.data_path, "Region table CSV")->required();
  };

  CLI::App* round = app.add_subcommand("round", "Publish a true table through a mechanism");
  add_inputs(round);
  add_out(round);
  round->add_option("--mechanism", o.mechanism, "rround or dlap");
  round->add_option("--t", o.t, "Discrete Laplace scale");
  round->add_flag("--clamp", o.clamp, "Clamp Laplace output at zero");
  round->add_option("--seed", o.seed, "Random seed");

  CLI::App* scan = app.add_subcommand("scan", "Find boundary-condition disclosures");
  add_inputs(scan);
  add_out(scan);
  scan->add_option("--kinds", o.kinds, "Comma-separated finding kinds (default all)");
  scan->add_flag("--verify", o.verify, "Re-derive every finding by enumeration");
  scan->add_flag("-v,--verbose", o.verbose, "List skipped groups");

  CLI::App* enumerate = app.add_subcommand("enumerate", "Enumerate a group's solution space");
  enumerate->add_option("--data", o.data_path, "Instance JSON")->required();
  add_out(enumerate);
  enumerate->add_option("--k", o.k, "Keep only the k most likely solutions");
  enumerate->add_option("--mass", o.mass, "Add per-attribute credible sets at this mass");
  enumerate->add_flag("--histogram", o.histogram, "Print marginal bar charts to stderr");
  enumerate->add_option("--cap", o.cap, "Raw assignment cap");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo attack rate");
  add_out(simulate);
  simulate->add_option("--kind", o.kind, "Finding kind");
  simulate->add_option("--n", o.n, "Rounded children per group");
  simulate->add_option("--trials", o.trials, "Number of synthetic groups");
  simulate->add_option("--seed", o.seed, "Random seed");
  simulate->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  simulate->add_option("--truth-low", o.truth_low, "Lowest synthetic true value");
  simulate->add_option("--truth-high", o.truth_high, "Highest synthetic true value");

  CLI::App* rates = app.add_subcommand("rates", "Closed-form attack rates");
  add_out(rates);

  CLI::App* utility = app.add_subcommand("utility", "Compare rounding and Laplace error");
  add_out(utility);
  utility->add_option("--t", o.t, "Discrete Laplace scale");
  utility->add_flag("--clamp", o.clamp, "Also sample the clamped mechanism");
  utility->add_option("--seed", o.seed, "Random seed for --clamp sampling");
  utility->add_option("--draws", o.draws, "Draws for --clamp sampling");
  utility->add_option("--at", o.at, "True value for --clamp sampling");
  utility->add_flag("--histogram", o.histogram, "Print signed-error PMFs to stderr");

  CLI::App* validate = app.add_subcommand("validate", "Check a true table's partition sums");
  add_inputs(validate);
  add_out(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (!o.isa.empty()) {
    std::optional<kernels::Isa> isa = kernels::ParseIsa(o.isa);
    if (!isa.has_value() || !kernels::IsaAvailable(*isa)) {
      return Fail(absl::InvalidArgumentError(
          absl::StrCat("ISA '", o.isa, "' is unknown or unsupported on this CPU")));
    }
    kernels::SetIsaOverride(*isa);
  }

  if (round->parsed()) return CmdRound(o);
  if (scan->parsed()) return CmdScan(o);
  if (enumerate->parsed()) return CmdEnumerate(o);
  if (simulate->parsed()) return CmdSimulate(o);
  if (rates->parsed()) return CmdRates(o);
  if (utility->parsed()) return CmdUtility(o);
  if (validate->parsed()) return CmdValidate(o);
  return kExitInput;
}

}  // namespace
}  // namespace unround

int main(int argc, char** argv) { return unround::Main(argc, argv); }
