// Copyright 2026 The tunectl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs every acceptance criterion and prints one verdict line per criterion.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "property_checks.h"
#include "test_support.h"
#include "tunectl/sim/canned_scenarios.h"

namespace tunectl::testing {
namespace {

CheckResult Scenario(const std::string& name) {
  auto report = sim::RunCannedScenario(name, 1);
  if (!report.ok()) return {false, std::string(report.status().message())};
  std::vector<std::string> failures;
  for (const auto& a : report->assertions) {
    if (!a.passed) failures.push_back(absl::StrCat(a.name, " [", a.detail, "]"));
  }
  if (!failures.empty()) return {false, absl::StrJoin(failures, "; ")};
  return {true, absl::StrCat(report->assertions.size(), " assertions, summary ",
                             report->summary.dump())};
}

CheckResult AllOf(const std::vector<std::pair<std::string, std::function<CheckResult()>>>& parts) {
  CheckResult combined{true, ""};
  for (const auto& [label, check] : parts) {
    const CheckResult r = check();
    combined.passed = combined.passed && r.passed;
    absl::StrAppend(&combined.detail, combined.detail.empty() ? "" : "; ", label, ": ",
                    r.passed ? "ok" : "FAILED", " (", r.detail, ")");
  }
  return combined;
}

struct Criterion {
  int number;
  std::string title;
  std::function<CheckResult()> check;
};

int Main() {
  TempDir dir;
  const std::vector<Criterion> criteria = {
      {1, "multi-tenancy quotas cap concurrency at 8 and 2",
       [] { return Scenario("multi-tenancy"); }},
      {2, "autoscaler spans 3 to 50 nodes and returns", [] { return Scenario("autoscale"); }},
      {3, "fail-trial chaos keeps exploration monotone", [] { return Scenario("chaos-fail"); }},
      {4, "kill-worker chaos ends with zero failed trials",
       [] { return Scenario("chaos-kill"); }},
      {5, "narrowed Bayesian search beats the wide random phase",
       [] { return Scenario("portability"); }},
      {6, "algorithm suite properties",
       [] {
         return AllOf({
             {"feasibility x1000", [] { return CheckSuggestionFeasibility(1000, 1); }},
             {"determinism x1000", [] { return CheckSuggestionDeterminism(1000, 2); }},
             {"grid completeness x1000", [] { return CheckGridCompleteness(1000, 3); }},
             {"sphere dominance 20x50", [] { return CheckSphereDominance(20, 50); }},
             {"hyperband (81, 3)", [] { return CheckHyperbandTable(81, 3); }},
         });
       }},
      {7, "storage backends and collectors agree",
       [&dir] {
         return AllOf({
             {"differential x10000",
              [&dir] { return CheckStorageDifferential(10000, 4, dir.path() / "storage"); }},
             {"push vs pull",
              [&dir] { return CheckPushPullEquivalence(200, 5, dir.path() / "push"); }},
         });
       }},
      {8, "recovery from 100 kill points",
       [&dir] { return CheckRecoveryEquivalence(100, 6, dir.path() / "recovery"); }},
  };

  bool all_passed = true;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const CheckResult result = criterion.check();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all_passed = all_passed && result.passed;
    std::printf("%s criterion %d: %s (%.2f s)\n", result.passed ? "PASS" : "FAIL",
                criterion.number, criterion.title.c_str(), seconds);
    std::printf("    %s\n", result.detail.c_str());
    std::fflush(stdout);
  }
  return all_passed ? 0 : 1;
}

}  // namespace
}  // namespace tunectl::testing

int main() { return tunectl::testing::Main(); }
