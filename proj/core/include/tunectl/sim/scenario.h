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

#ifndef TUNECTL_SIM_SCENARIO_H_
#define TUNECTL_SIM_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/controller/resource_store.h"
#include "tunectl/metrics/memory_store.h"
#include "tunectl/model/experiment.h"
#include "tunectl/sim/world.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::sim {

struct Scenario {
  std::string name;
  WorldConfig world;
  std::vector<ExperimentSpec> experiments;
  std::int64_t max_ticks = 100000;
  // Ticks to keep simulating after every experiment has finished, so that
  // idle nodes can drain. Defaults to the scale-down grace plus one when an
  // autoscaler is configured.
  std::int64_t settle_ticks = 0;
};

// Reads a scenario document:
//
//   name: demo
//   seed: 7
//   maxTicks: 5000
//   cluster:
//     gangScheduling: false
//     nodes: [{count: 3, cpu: 8}]
//     namespaces: [{name: user1, cpuLimit: 18}]
//   autoscaler: {minNodes: 3, maxNodes: 50, nodeCpu: 4, scaleDownGraceTicks: 10}
//   chaos: {mode: fail-trial, fraction: 0.05, intervalTicks: 20}
//   algorithmServiceCpu: 0.5
//   experiments:
//     - file: sphere.yaml          # relative to `base_dir`
//     - inline: {name: ..., ...}   # an experiment document
absl::StatusOr<Scenario> ParseScenario(
    std::string_view text, const std::filesystem::path& base_dir,
    const ValidationContext& context = BuiltinValidationContext());
absl::StatusOr<Scenario> LoadScenario(
    const std::filesystem::path& path,
    const ValidationContext& context = BuiltinValidationContext());

// Owns everything a running scenario needs.
struct ScenarioRun {
  std::unique_ptr<controller::ResourceStore> store;
  std::unique_ptr<metrics::MemoryObservationStore> metrics;
  std::unique_ptr<World> world;
  bool finished = false;
};

// Submits the experiments at tick 0 and ticks until they all finish (plus
// the settle period) or the tick limit.
absl::StatusOr<ScenarioRun> RunScenario(
    const Scenario& scenario,
    const suggest::AlgorithmRegistry& registry = suggest::AlgorithmRegistry::Builtin());

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_SCENARIO_H_
