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

#include "benchmark/benchmark.h"
#include "tunectl/sim/canned_scenarios.h"
#include "tunectl/sim/scenario.h"

namespace tunectl::sim {
namespace {

// A full autoscale run: 250 trials on up to 50 nodes.
void BM_AutoscaleScenario(benchmark::State& state) {
  const Scenario scenario = AutoscaleScenario(1);
  std::int64_t ticks = 0;
  for (auto _ : state) {
    auto run = RunScenario(scenario);
    ticks += run.ok() ? run->world->tick() : 0;
  }
  state.counters["ticks/s"] = benchmark::Counter(static_cast<double>(ticks),
                                                  benchmark::Counter::kIsRate);
}
BENCHMARK(BM_AutoscaleScenario)->Unit(benchmark::kMillisecond);

void BM_MultiTenancyScenario(benchmark::State& state) {
  const Scenario scenario = MultiTenancyScenario(1);
  for (auto _ : state) benchmark::DoNotOptimize(RunScenario(scenario));
}
BENCHMARK(BM_MultiTenancyScenario)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tunectl::sim
