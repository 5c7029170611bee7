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

#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "tunectl/common/rng.h"
#include "tunectl/suggest/algorithm.h"
#include "tunectl/suggest/gaussian_process.h"

namespace tunectl::suggest {
namespace {

void BM_GaussianProcessFit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<std::vector<double>> points(n, std::vector<double>(3));
  std::vector<double> targets(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double& x : points[i]) {
      x = rng.Uniform01();
      sum += (x - 0.5) * (x - 0.5);
    }
    targets[i] = sum;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(GaussianProcess::FitMaxLikelihood(points, targets, 1e-6));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GaussianProcessFit)->RangeMultiplier(2)->Range(8, 256)->Complexity();

ExperimentSpec SphereSpec(const std::string& algorithm) {
  ExperimentSpec spec;
  spec.name = "bench";
  spec.objective.type = ObjectiveType::kMinimize;
  spec.objective.objective_metric_name = "loss";
  spec.algorithm.algorithm_name = algorithm;
  spec.algorithm.settings["random_state"] = "1";
  spec.parallel_trial_count = 1;
  spec.max_trial_count = 1000;
  for (const char* name : {"x0", "x1", "x2"}) {
    spec.parameters.push_back({name, ParameterType::kDouble, Range{-5, 5, std::nullopt}});
  }
  spec.trial_template.payload = SimObjectiveDescriptor{"sphere", 1, 0.0, 0};
  return spec;
}

// One suggestion given `n` completed observations.
void SuggestWithHistory(benchmark::State& state, const std::string& algorithm) {
  const int n = static_cast<int>(state.range(0));
  const ExperimentSpec spec = SphereSpec(algorithm);
  Rng rng(2);
  SuggestionRequest request;
  request.experiment = &spec;
  for (int i = 0; i < n; ++i) {
    TrialObservation observation;
    double sum = 0.0;
    for (const auto& p : spec.parameters) {
      const double x = rng.Uniform(-5, 5);
      sum += x * x;
      observation.assignments.push_back({p.name, std::to_string(x)});
    }
    observation.objective_value = sum;
    request.history.push_back(std::move(observation));
  }
  const auto& registry = AlgorithmRegistry::Builtin();
  for (auto _ : state) {
    benchmark::DoNotOptimize(GetSuggestions(registry, request));
  }
}

void BM_TpeSuggest(benchmark::State& state) { SuggestWithHistory(state, "tpe"); }
BENCHMARK(BM_TpeSuggest)->RangeMultiplier(4)->Range(16, 1024);

void BM_BayesianOptimizationSuggest(benchmark::State& state) {
  SuggestWithHistory(state, "bayesianoptimization");
}
BENCHMARK(BM_BayesianOptimizationSuggest)->RangeMultiplier(2)->Range(8, 128);

}  // namespace
}  // namespace tunectl::suggest
