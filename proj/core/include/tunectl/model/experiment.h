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

// Declarative resource types for an experiment: what to optimize, over which
// search space, with which algorithm, and how each trial is executed.

#ifndef TUNECTL_MODEL_EXPERIMENT_H_
#define TUNECTL_MODEL_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tunectl {

enum class ObjectiveType { kMaximize, kMinimize };

// How a trial's series of objective values is reduced to one number.
enum class MetricStrategy { kLatest, kMax, kMin };

enum class ParameterType { kInt, kDouble, kDiscrete, kCategorical };

enum class MetricCollectorKind { kPush, kPull };

enum class RestartPolicy { kNever, kOnTemporaryFailure };

enum class TrialKind { kSimulated, kLocalProcess };

struct ObjectiveSpec {
  ObjectiveType type = ObjectiveType::kMaximize;
  std::optional<double> goal;
  std::string objective_metric_name;
  std::vector<std::string> additional_metric_names;
  MetricStrategy metric_strategy = MetricStrategy::kLatest;

  bool operator==(const ObjectiveSpec&) const = default;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  std::optional<double> step;

  bool operator==(const Range&) const = default;
};

struct ValueList {
  std::vector<std::string> values;

  bool operator==(const ValueList&) const = default;
};

struct ParameterSpec {
  std::string name;
  ParameterType type = ParameterType::kDouble;
  std::variant<Range, ValueList> feasible_space;

  const Range* range() const { return std::get_if<Range>(&feasible_space); }
  const ValueList* list() const { return std::get_if<ValueList>(&feasible_space); }

  bool operator==(const ParameterSpec&) const = default;
};

struct AlgorithmSpec {
  std::string algorithm_name;
  std::map<std::string, std::string> settings;

  bool operator==(const AlgorithmSpec&) const = default;
};

struct CommandTemplate {
  std::string command;

  bool operator==(const CommandTemplate&) const = default;
};

// Synthetic workload run by the cluster simulator instead of real training.
struct SimObjectiveDescriptor {
  std::string function_name;
  std::int64_t duration_ticks = 1;
  double noise_stddev = 0.0;
  std::int64_t rng_seed_offset = 0;

  bool operator==(const SimObjectiveDescriptor&) const = default;
};

struct TrialTemplate {
  int worker_count = 1;
  double cpu_per_worker = 1.0;
  RestartPolicy restart_policy = RestartPolicy::kNever;
  std::variant<SimObjectiveDescriptor, CommandTemplate> payload;

  TrialKind kind() const {
    return std::holds_alternative<SimObjectiveDescriptor>(payload)
               ? TrialKind::kSimulated
               : TrialKind::kLocalProcess;
  }

  bool operator==(const TrialTemplate&) const = default;
};

struct ExperimentSpec {
  std::string name;
  std::string namespace_name = "default";
  ObjectiveSpec objective;
  AlgorithmSpec algorithm;
  int parallel_trial_count = 1;
  int max_trial_count = 1;
  int max_failed_trial_count = 0;
  MetricCollectorKind metric_collector_kind = MetricCollectorKind::kPull;
  std::vector<ParameterSpec> parameters;
  TrialTemplate trial_template;

  const ParameterSpec* FindParameter(std::string_view name) const;

  bool operator==(const ExperimentSpec&) const = default;
};

struct ParameterAssignment {
  std::string name;
  std::string value;

  bool operator==(const ParameterAssignment&) const = default;
  auto operator<=>(const ParameterAssignment&) const = default;
};

// One value per declared parameter, in declaration order. Hyperband appends a
// trailing `budget` entry.
using AssignmentSet = std::vector<ParameterAssignment>;

const ParameterAssignment* FindAssignment(const AssignmentSet& set, std::string_view name);

// A trial template with every placeholder substituted.
struct TrialRunSpec {
  std::string trial_name;
  std::string namespace_name;
  std::variant<SimObjectiveDescriptor, std::string> resolved_payload;
  AssignmentSet parameter_assignments;
  // Share of the full training budget this run covers (hyperband rungs).
  double resource_fraction = 1.0;

  bool operator==(const TrialRunSpec&) const = default;
};

inline constexpr std::string_view kBudgetParameter = "budget";

std::string_view ToString(ObjectiveType type);
std::string_view ToString(MetricStrategy strategy);
std::string_view ToString(ParameterType type);
std::string_view ToString(MetricCollectorKind kind);
std::string_view ToString(RestartPolicy policy);
std::string_view ToString(TrialKind kind);

std::optional<ObjectiveType> ParseObjectiveType(std::string_view text);
std::optional<MetricStrategy> ParseMetricStrategy(std::string_view text);
std::optional<ParameterType> ParseParameterType(std::string_view text);
std::optional<MetricCollectorKind> ParseMetricCollectorKind(std::string_view text);
std::optional<RestartPolicy> ParseRestartPolicy(std::string_view text);
std::optional<TrialKind> ParseTrialKind(std::string_view text);

// Returns true when `best` satisfies the objective goal. Equality meets it.
bool GoalMet(const ObjectiveSpec& objective, double best);

// Returns true when `a` is strictly better than `b` under the objective.
bool IsBetter(ObjectiveType type, double a, double b);

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  std::string path;
  std::string message;
  int line = -1;  // 1-based when known
  int column = -1;

  std::string ToString() const;
};

using IssueSink = std::vector<ValidationIssue>;

struct AlgorithmRules {
  std::set<std::string> settings;
  // Extra algorithm-specific admission checks.
  std::function<void(const ExperimentSpec&, IssueSink&)> check;
};

struct ValidationContext {
  std::map<std::string, AlgorithmRules, std::less<>> algorithms;
  std::set<std::string, std::less<>> simulated_functions;
};

// The five built-in algorithms and the simulator's objective functions.
const ValidationContext& BuiltinValidationContext();

// Checks every type invariant. Returns all violations, never fails fast.
IssueSink ValidateExperiment(const ExperimentSpec& spec, const ValidationContext& context);

}  // namespace tunectl

#endif  // TUNECTL_MODEL_EXPERIMENT_H_
