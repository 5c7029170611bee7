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

#include "test_support.h"

#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "absl/strings/str_cat.h"
#include "tunectl/common/numeric_format.h"

namespace tunectl::testing {
namespace {

constexpr std::string_view kAlgorithms[] = {"random", "grid", "bayesianoptimization", "tpe",
                                            "hyperband"};
constexpr std::string_view kNameChars = "abcdefghijklmnopqrstuvwxyz0123456789";

std::string RandomIdentifier(Rng& rng, int length) {
  std::string out;
  for (int i = 0; i < length; ++i) {
    // Leading character is a letter so generated names read naturally.
    out.push_back(kNameChars[rng.Index(i == 0 ? 26 : kNameChars.size())]);
  }
  return out;
}

// Multiples of a quarter are exact in binary, so lattice arithmetic on them
// never drifts.
double Quarter(Rng& rng, int lo, int hi) { return static_cast<double>(rng.UniformInt(lo, hi)) / 4; }

ParameterSpec RandomParameter(Rng& rng, const std::string& name, bool grid, bool small) {
  ParameterSpec parameter;
  parameter.name = name;
  switch (rng.UniformInt(0, 3)) {
    case 0: {
      parameter.type = ParameterType::kDouble;
      Range range;
      range.min = Quarter(rng, -40, 40);
      const double steps[] = {0.25, 0.5, 1.0, 2.0};
      if (grid || rng.UniformInt(0, 3) == 0) {
        const double step = steps[rng.Index(4)];
        range.step = step;
        range.max = range.min + step * static_cast<double>(rng.UniformInt(1, small ? 4 : 20));
      } else {
        range.max = range.min + Quarter(rng, 1, 80);
      }
      parameter.feasible_space = range;
      break;
    }
    case 1: {
      parameter.type = ParameterType::kInt;
      Range range;
      range.min = static_cast<double>(rng.UniformInt(-20, 20));
      range.max = range.min + static_cast<double>(rng.UniformInt(1, small ? 5 : 40));
      if (rng.UniformInt(0, 2) == 0) {
        range.step = static_cast<double>(rng.UniformInt(1, static_cast<std::int64_t>(range.max - range.min)));
      }
      parameter.feasible_space = range;
      break;
    }
    case 2: {
      parameter.type = ParameterType::kDiscrete;
      ValueList list;
      const auto count = rng.UniformInt(1, small ? 3 : 6);
      double value = Quarter(rng, -40, 0);
      for (std::int64_t i = 0; i < count; ++i) {
        value += Quarter(rng, 1, 12);
        list.values.push_back(FormatDouble(value));
      }
      parameter.feasible_space = list;
      break;
    }
    default: {
      parameter.type = ParameterType::kCategorical;
      ValueList list;
      const auto count = rng.UniformInt(1, small ? 3 : 6);
      for (std::int64_t i = 0; i < count; ++i) list.values.push_back(absl::StrCat("c", i));
      parameter.feasible_space = list;
      break;
    }
  }
  return parameter;
}

}  // namespace

TempDir::TempDir() {
  static std::uint64_t counter = 0;
  const auto base = std::filesystem::temp_directory_path();
  Rng rng(DeriveSeed(static_cast<std::uint64_t>(::getpid()), counter++,
                     std::chrono::steady_clock::now().time_since_epoch().count()));
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / absl::StrCat("tunectl-test-", rng.NextU64() % 1000000000);
    if (std::filesystem::create_directory(candidate)) {
      path_ = std::move(candidate);
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ignored;
  std::filesystem::remove_all(path_, ignored);
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string MnistExperimentYaml() {
  return R"(name: random-example
namespace: kubeflow
objective:
  type: maximize
  goal: 0.99
  objectiveMetricName: Validation-accuracy
  additionalMetricNames:
    - accuracy
algorithm:
  algorithmName: bayesianoptimization
  settings:
    random_state: "10"
parallelTrialCount: 3
maxTrialCount: 12
maxFailedTrialCount: 3
parameters:
  - name: lr
    parameterType: double
    feasibleSpace:
      min: "0.01"
      max: "0.03"
  - name: num-layers
    parameterType: int
    feasibleSpace:
      min: "2"
      max: "5"
  - name: optimizer
    parameterType: categorical
    feasibleSpace:
      list:
        - sgd
        - adam
        - ftrl
trialTemplate:
  kind: local-process
  workerCount: 1
  cpuPerWorker: 1
  command: python3 /opt/mxnet-mnist/mnist.py --batch-size=64 ${hyperparameters}
)";
}

ParameterSpec DoubleParameter(std::string name, double min, double max) {
  return ParameterSpec{std::move(name), ParameterType::kDouble, Range{min, max, std::nullopt}};
}

ParameterSpec IntParameter(std::string name, double min, double max) {
  return ParameterSpec{std::move(name), ParameterType::kInt, Range{min, max, std::nullopt}};
}

ParameterSpec CategoricalParameter(std::string name, std::vector<std::string> values) {
  return ParameterSpec{std::move(name), ParameterType::kCategorical, ValueList{std::move(values)}};
}

ExperimentSpec SphereExperiment(std::string_view algorithm, std::uint64_t random_state,
                                int dimensions, int max_trials, int parallel) {
  ExperimentSpec spec;
  spec.name = "sphere";
  spec.objective.type = ObjectiveType::kMinimize;
  spec.objective.objective_metric_name = "loss";
  spec.algorithm.algorithm_name = std::string(algorithm);
  spec.algorithm.settings["random_state"] = std::to_string(random_state);
  spec.parallel_trial_count = parallel;
  spec.max_trial_count = max_trials;
  for (int i = 0; i < dimensions; ++i) {
    spec.parameters.push_back(DoubleParameter(absl::StrCat("x", i), -5.0, 5.0));
  }
  SimObjectiveDescriptor sim;
  sim.function_name = "sphere";
  sim.duration_ticks = 3;
  spec.trial_template.payload = sim;
  return spec;
}

ExperimentSpec RandomValidSpec(std::uint64_t seed, const SpecGeneratorOptions& options) {
  Rng rng(DeriveSeed(seed, "spec"));
  ExperimentSpec spec;
  spec.name = RandomIdentifier(rng, static_cast<int>(rng.UniformInt(1, 12)));
  spec.namespace_name = rng.UniformInt(0, 1) ? "default" : RandomIdentifier(rng, 6);
  spec.algorithm.algorithm_name = options.algorithm.empty()
                                      ? std::string(kAlgorithms[rng.Index(std::size(kAlgorithms))])
                                      : options.algorithm;
  const std::string& algorithm = spec.algorithm.algorithm_name;
  const bool grid = algorithm == "grid";
  const bool hyperband = algorithm == "hyperband";
  if (!grid && rng.UniformInt(0, 3) != 0) {
    spec.algorithm.settings["random_state"] = std::to_string(rng.UniformInt(0, 1 << 30));
  }
  if (hyperband) {
    const std::int64_t eta = rng.UniformInt(2, 4);
    spec.algorithm.settings["eta"] = std::to_string(eta);
    spec.algorithm.settings["max_resource"] =
        std::to_string(options.small_search_space ? rng.UniformInt(1, 27) : rng.UniformInt(1, 243));
  }

  spec.objective.type = rng.UniformInt(0, 1) ? ObjectiveType::kMaximize : ObjectiveType::kMinimize;
  spec.objective.objective_metric_name = rng.UniformInt(0, 1) ? "loss" : "Validation-accuracy";
  if (rng.UniformInt(0, 1)) spec.objective.additional_metric_names.push_back("accuracy");
  if (rng.UniformInt(0, 2) == 0) spec.objective.goal = Quarter(rng, -8, 8);
  const MetricStrategy strategies[] = {MetricStrategy::kLatest, MetricStrategy::kMax,
                                       MetricStrategy::kMin};
  spec.objective.metric_strategy = strategies[rng.Index(3)];

  spec.max_trial_count = static_cast<int>(rng.UniformInt(1, 40));
  spec.parallel_trial_count = static_cast<int>(rng.UniformInt(1, spec.max_trial_count));
  spec.max_failed_trial_count = static_cast<int>(rng.UniformInt(0, 10));
  spec.metric_collector_kind =
      rng.UniformInt(0, 1) ? MetricCollectorKind::kPush : MetricCollectorKind::kPull;

  const auto parameter_count = rng.UniformInt(1, options.small_search_space ? 3 : 5);
  const std::string_view separators[] = {"", "-", "_", "."};
  for (std::int64_t i = 0; i < parameter_count; ++i) {
    std::string name = absl::StrCat("p", std::string(separators[rng.Index(4)]), i);
    spec.parameters.push_back(RandomParameter(rng, name, grid, options.small_search_space));
  }

  TrialTemplate& trial_template = spec.trial_template;
  trial_template.worker_count = static_cast<int>(rng.UniformInt(1, 3));
  trial_template.cpu_per_worker = Quarter(rng, 1, 16);
  trial_template.restart_policy =
      rng.UniformInt(0, 1) ? RestartPolicy::kOnTemporaryFailure : RestartPolicy::kNever;
  if (rng.UniformInt(0, 1)) {
    SimObjectiveDescriptor sim;
    const char* functions[] = {"sphere", "rosenbrock", "mnist-surrogate"};
    sim.function_name = functions[rng.Index(3)];
    sim.duration_ticks = rng.UniformInt(1, 30);
    sim.noise_stddev = Quarter(rng, 0, 2);
    sim.rng_seed_offset = rng.UniformInt(0, 100);
    trial_template.payload = sim;
  } else {
    std::string command = "train --name=${trial.name} --ns=${trial.namespace}";
    if (rng.UniformInt(0, 1)) {
      absl::StrAppend(&command, " ${hyperparameters}");
    } else {
      for (const auto& parameter : spec.parameters) {
        absl::StrAppend(&command, " --", parameter.name, "=${", parameter.name, "}");
      }
    }
    if (hyperband) absl::StrAppend(&command, " --epochs=${budget}");
    trial_template.payload = CommandTemplate{command};
  }
  return spec;
}

suggest::TrialObservation SyntheticOutcome(const AssignmentSet& assignments, std::uint64_t salt) {
  std::uint64_t h = salt;
  for (const auto& assignment : assignments) {
    h = DeriveSeed(h, assignment.name, assignment.value);
  }
  suggest::TrialObservation observation;
  observation.assignments = assignments;
  if (h % 5 == 0) {
    observation.status = suggest::ObservationStatus::kFailed;
  } else {
    observation.status = suggest::ObservationStatus::kSucceeded;
    observation.objective_value = static_cast<double>(h >> 11) * 0x1.0p-53;
  }
  if (const auto* budget = FindAssignment(assignments, kBudgetParameter)) {
    observation.resource_consumed = ParseDouble(budget->value);
  }
  return observation;
}

}  // namespace tunectl::testing
