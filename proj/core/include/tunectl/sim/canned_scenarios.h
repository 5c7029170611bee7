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

#ifndef TUNECTL_SIM_CANNED_SCENARIOS_H_
#define TUNECTL_SIM_CANNED_SCENARIOS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"
#include "tunectl/sim/scenario.h"

namespace tunectl::sim {

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<AssertionResult> assertions;
  // Scenario-specific figures, e.g. peak concurrency or failure counts.
  nlohmann::json summary = nlohmann::json::object();
  // JSON lines of every run the scenario performed.
  std::string events;

  bool passed() const;
};

// multi-tenancy, autoscale, chaos-fail, chaos-kill, portability.
const std::vector<std::string>& CannedScenarioNames();

// Two tenants on 3 x 8 vCPU with quotas 18 and 6, each running 12 parallel
// 2 vCPU trials.
Scenario MultiTenancyScenario(std::uint64_t seed);
// 3 x 4 vCPU autoscaled within [3, 50] under 250 parallel 2 vCPU trials.
Scenario AutoscaleScenario(std::uint64_t seed);
// Minimize a 3-D sphere with 150 trials, 10 parallel and an error budget of
// 100 while `fraction` of running trials fail every 20 ticks.
Scenario ChaosFailScenario(double fraction, std::uint64_t seed);
// 2-worker restartable trials losing a worker of 5% of running trials every
// 20 ticks.
Scenario ChaosKillScenario(std::uint64_t seed);

// The two-phase mnist-surrogate study: 15 random trials over wide ranges,
// then 50 Bayesian trials over narrowed ranges.
ExperimentSpec PortabilityWideExperiment(std::uint64_t seed);
ExperimentSpec PortabilityNarrowExperiment(std::uint64_t seed);

// Highest noise-free surrogate accuracy over the wide search space,
// found by exhaustive grid search.
double MnistSurrogateOptimum();

// Checks that hold for any run: capacity and quota safety, autoscaler
// bounds and gang atomicity.
std::vector<AssertionResult> InvariantAssertions(const Scenario& scenario, const ScenarioRun& run);

// Runs a canned scenario and evaluates its assertions.
absl::StatusOr<ScenarioReport> RunCannedScenario(std::string_view name, std::uint64_t seed);

// Runs any scenario and evaluates the invariant assertions plus
// completion of every experiment.
absl::StatusOr<ScenarioReport> RunScenarioWithChecks(const Scenario& scenario);

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_CANNED_SCENARIOS_H_
