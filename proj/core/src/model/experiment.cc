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

#include "tunectl/model/experiment.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/model/trial_template.h"

namespace tunectl {
namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> LookupEnum(const std::pair<Enum, std::string_view> (&table)[N],
                               std::string_view text) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view EnumName(const std::pair<Enum, std::string_view> (&table)[N], Enum value) {
  for (const auto& [candidate, name] : table) {
    if (candidate == value) return name;
  }
  return "unknown";
}

constexpr std::pair<ObjectiveType, std::string_view> kObjectiveTypes[] = {
    {ObjectiveType::kMaximize, "maximize"}, {ObjectiveType::kMinimize, "minimize"}};
constexpr std::pair<MetricStrategy, std::string_view> kMetricStrategies[] = {
    {MetricStrategy::kLatest, "latest"},
    {MetricStrategy::kMax, "max"},
    {MetricStrategy::kMin, "min"}};
constexpr std::pair<ParameterType, std::string_view> kParameterTypes[] = {
    {ParameterType::kInt, "int"},
    {ParameterType::kDouble, "double"},
    {ParameterType::kDiscrete, "discrete"},
    {ParameterType::kCategorical, "categorical"}};
constexpr std::pair<MetricCollectorKind, std::string_view> kCollectorKinds[] = {
    {MetricCollectorKind::kPush, "push"}, {MetricCollectorKind::kPull, "pull"}};
constexpr std::pair<RestartPolicy, std::string_view> kRestartPolicies[] = {
    {RestartPolicy::kNever, "never"},
    {RestartPolicy::kOnTemporaryFailure, "on-temporary-failure"}};
constexpr std::pair<TrialKind, std::string_view> kTrialKinds[] = {
    {TrialKind::kSimulated, "simulated"}, {TrialKind::kLocalProcess, "local-process"}};

// Lowercase alphanumerics and '-', starting and ending alphanumeric.
bool IsIdentifier(std::string_view text, std::size_t max_length) {
  if (text.empty() || text.size() > max_length) return false;
  auto alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!alnum(text.front()) || !alnum(text.back())) return false;
  for (char c : text) {
    if (!alnum(c) && c != '-') return false;
  }
  return true;
}

bool IsParameterName(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

// Metric names appear in `<ts> <name>=<value>` lines.
bool IsMetricName(std::string_view text) {
  if (text.empty()) return false;
  for (char c : text) {
    if (c == '=' || c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

bool IsIntegral(double value) { return std::isfinite(value) && std::floor(value) == value; }

void Report(IssueSink& sink, std::string path, std::string message) {
  sink.push_back(ValidationIssue{std::move(path), std::move(message)});
}

void CheckRandomState(const ExperimentSpec& spec, IssueSink& sink) {
  auto it = spec.algorithm.settings.find("random_state");
  if (it == spec.algorithm.settings.end()) return;
  auto value = ParseInt(it->second);
  if (!value || *value < 0) {
    Report(sink, "algorithm.settings.random_state", "must be a non-negative integer");
  }
}

void CheckGrid(const ExperimentSpec& spec, IssueSink& sink) {
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    const auto& parameter = spec.parameters[i];
    if (parameter.type == ParameterType::kDouble && parameter.range() &&
        !parameter.range()->step) {
      Report(sink, absl::StrCat("parameters[", i, "].feasibleSpace.step"),
             "grid search requires a step for double parameters");
    }
  }
}

void CheckHyperband(const ExperimentSpec& spec, IssueSink& sink) {
  const auto& settings = spec.algorithm.settings;
  if (auto it = settings.find("eta"); it != settings.end()) {
    auto value = ParseInt(it->second);
    if (!value || *value < 2) Report(sink, "algorithm.settings.eta", "must be an integer >= 2");
  }
  if (auto it = settings.find("max_resource"); it != settings.end()) {
    auto value = ParseInt(it->second);
    if (!value || *value < 1) {
      Report(sink, "algorithm.settings.max_resource", "must be an integer >= 1");
    }
  }
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    if (spec.parameters[i].name == kBudgetParameter) {
      Report(sink, absl::StrCat("parameters[", i, "].name"),
             "'budget' is reserved by hyperband");
    }
  }
}

AlgorithmRules MakeRules(std::set<std::string> settings,
                         std::function<void(const ExperimentSpec&, IssueSink&)> check = {}) {
  return AlgorithmRules{std::move(settings), std::move(check)};
}

void ValidateRange(const ParameterSpec& parameter, const Range& range, const std::string& path,
                   IssueSink& sink) {
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
    Report(sink, path, "min and max must be finite");
    return;
  }
  if (!(range.min < range.max)) {
    Report(sink, path, "min < max violated");
    return;
  }
  if (parameter.type == ParameterType::kInt &&
      (!IsIntegral(range.min) || !IsIntegral(range.max))) {
    Report(sink, path, "int parameter bounds must be integers");
  }
  if (range.step) {
    const double step = *range.step;
    if (!std::isfinite(step) || !(step > 0)) {
      Report(sink, path + ".step", "step must be > 0");
    } else if ((range.max - range.min) / step < 1.0) {
      Report(sink, path + ".step", "(max - min) / step >= 1 violated");
    } else if (parameter.type == ParameterType::kInt && !IsIntegral(step)) {
      Report(sink, path + ".step", "int parameter step must be an integer");
    }
  }
}

void ValidateList(const ParameterSpec& parameter, const ValueList& list, const std::string& path,
                  IssueSink& sink) {
  if (list.values.empty()) {
    Report(sink, path, "value list must be non-empty");
    return;
  }
  std::set<std::string, std::less<>> seen;
  for (std::size_t j = 0; j < list.values.size(); ++j) {
    const auto& value = list.values[j];
    if (!seen.insert(value).second) {
      Report(sink, absl::StrCat(path, ".list[", j, "]"), absl::StrCat("duplicate value '", value, "'"));
    }
    if (parameter.type == ParameterType::kDiscrete) {
      auto number = ParseDouble(value);
      if (!number || !std::isfinite(*number)) {
        Report(sink, absl::StrCat(path, ".list[", j, "]"),
               absl::StrCat("discrete value '", value, "' is not a number"));
      }
    }
  }
}

}  // namespace

const ParameterSpec* ExperimentSpec::FindParameter(std::string_view name) const {
  for (const auto& parameter : parameters) {
    if (parameter.name == name) return &parameter;
  }
  return nullptr;
}

const ParameterAssignment* FindAssignment(const AssignmentSet& set, std::string_view name) {
  for (const auto& assignment : set) {
    if (assignment.name == name) return &assignment;
  }
  return nullptr;
}

std::string_view ToString(ObjectiveType type) { return EnumName(kObjectiveTypes, type); }
std::string_view ToString(MetricStrategy strategy) {
  return EnumName(kMetricStrategies, strategy);
}
std::string_view ToString(ParameterType type) { return EnumName(kParameterTypes, type); }
std::string_view ToString(MetricCollectorKind kind) { return EnumName(kCollectorKinds, kind); }
std::string_view ToString(RestartPolicy policy) { return EnumName(kRestartPolicies, policy); }
std::string_view ToString(TrialKind kind) { return EnumName(kTrialKinds, kind); }

std::optional<ObjectiveType> ParseObjectiveType(std::string_view text) {
  return LookupEnum(kObjectiveTypes, text);
}
std::optional<MetricStrategy> ParseMetricStrategy(std::string_view text) {
  return LookupEnum(kMetricStrategies, text);
}
std::optional<ParameterType> ParseParameterType(std::string_view text) {
  return LookupEnum(kParameterTypes, text);
}
std::optional<MetricCollectorKind> ParseMetricCollectorKind(std::string_view text) {
  return LookupEnum(kCollectorKinds, text);
}
std::optional<RestartPolicy> ParseRestartPolicy(std::string_view text) {
  return LookupEnum(kRestartPolicies, text);
}
std::optional<TrialKind> ParseTrialKind(std::string_view text) {
  return LookupEnum(kTrialKinds, text);
}

bool GoalMet(const ObjectiveSpec& objective, double best) {
  if (!objective.goal) return false;
  return objective.type == ObjectiveType::kMaximize ? best >= *objective.goal
                                                    : best <= *objective.goal;
}

bool IsBetter(ObjectiveType type, double a, double b) {
  return type == ObjectiveType::kMaximize ? a > b : a < b;
}

std::string ValidationIssue::ToString() const {
  if (line > 0) return absl::StrCat(line, ":", column, ": ", path, ": ", message);
  return absl::StrCat(path, ": ", message);
}

const ValidationContext& BuiltinValidationContext() {
  static const ValidationContext* context = [] {
    auto* ctx = new ValidationContext;
    ctx->algorithms.emplace("random", MakeRules({"random_state"}));
    ctx->algorithms.emplace("grid", MakeRules({}, CheckGrid));
    ctx->algorithms.emplace("bayesianoptimization", MakeRules({"random_state"}));
    ctx->algorithms.emplace("tpe", MakeRules({"random_state"}));
    ctx->algorithms.emplace("hyperband",
                            MakeRules({"random_state", "max_resource", "eta"}, CheckHyperband));
    ctx->simulated_functions = {"sphere", "rosenbrock", "mnist-surrogate"};
    return ctx;
  }();
  return *context;
}

IssueSink ValidateExperiment(const ExperimentSpec& spec, const ValidationContext& context) {
  IssueSink sink;

  if (!IsIdentifier(spec.name, 48)) {
    Report(sink, "name", "must be a lowercase identifier of at most 48 characters");
  }
  if (!IsIdentifier(spec.namespace_name, 63)) {
    Report(sink, "namespace", "must be a lowercase identifier of at most 63 characters");
  }

  // objective
  const auto& objective = spec.objective;
  if (!IsMetricName(objective.objective_metric_name)) {
    Report(sink, "objective.objectiveMetricName",
           "must be non-empty without whitespace or '='");
  }
  if (objective.goal && !std::isfinite(*objective.goal)) {
    Report(sink, "objective.goal", "goal must be finite");
  }
  {
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < objective.additional_metric_names.size(); ++i) {
      const auto& metric = objective.additional_metric_names[i];
      const std::string path = absl::StrCat("objective.additionalMetricNames[", i, "]");
      if (!IsMetricName(metric)) {
        Report(sink, path, "must be non-empty without whitespace or '='");
      }
      if (metric == objective.objective_metric_name) {
        Report(sink, path, "objectiveMetricName must not be repeated in additionalMetricNames");
      }
      if (!seen.insert(metric).second) Report(sink, path, "duplicate metric name");
    }
  }

  // algorithm
  const AlgorithmRules* rules = nullptr;
  if (auto it = context.algorithms.find(spec.algorithm.algorithm_name);
      it != context.algorithms.end()) {
    rules = &it->second;
  } else {
    Report(sink, "algorithm.algorithmName",
           absl::StrCat("unknown algorithm '", spec.algorithm.algorithm_name, "'"));
  }
  if (rules != nullptr) {
    for (const auto& [key, value] : spec.algorithm.settings) {
      if (!rules->settings.contains(key)) {
        Report(sink, absl::StrCat("algorithm.settings.", key),
               absl::StrCat("unknown setting for ", spec.algorithm.algorithm_name));
      }
    }
    CheckRandomState(spec, sink);
    if (rules->check) rules->check(spec, sink);
  }

  // budgets
  if (spec.parallel_trial_count < 1) {
    Report(sink, "parallelTrialCount", "must be >= 1");
  }
  if (spec.max_trial_count < 1) {
    Report(sink, "maxTrialCount", "must be >= 1");
  }
  if (spec.parallel_trial_count > spec.max_trial_count) {
    Report(sink, "parallelTrialCount", "parallelTrialCount <= maxTrialCount violated");
  }
  if (spec.max_failed_trial_count < 0) {
    Report(sink, "maxFailedTrialCount", "must be >= 0");
  }

  // parameters
  if (spec.parameters.empty()) {
    Report(sink, "parameters", "at least one parameter is required");
  }
  std::set<std::string, std::less<>> names;
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    const auto& parameter = spec.parameters[i];
    const std::string path = absl::StrCat("parameters[", i, "]");
    if (!IsParameterName(parameter.name)) {
      Report(sink, path + ".name", "must be non-empty and use [A-Za-z0-9_.-]");
    } else if (parameter.name == kHyperparametersPlaceholder ||
               parameter.name.starts_with("trial.")) {
      Report(sink, path + ".name", absl::StrCat("'", parameter.name, "' is reserved"));
    }
    if (!parameter.name.empty() && !names.insert(parameter.name).second) {
      Report(sink, path + ".name", absl::StrCat("duplicate parameter name '", parameter.name, "'"));
    }
    const bool wants_range =
        parameter.type == ParameterType::kInt || parameter.type == ParameterType::kDouble;
    if (const auto* range = parameter.range()) {
      if (!wants_range) {
        Report(sink, path + ".feasibleSpace",
               absl::StrCat(std::string(ToString(parameter.type)), " parameters take a value list"));
      } else {
        ValidateRange(parameter, *range, path + ".feasibleSpace", sink);
      }
    } else if (const auto* list = parameter.list()) {
      if (wants_range) {
        Report(sink, path + ".feasibleSpace",
               absl::StrCat(std::string(ToString(parameter.type)), " parameters take a min/max range"));
      } else {
        ValidateList(parameter, *list, path + ".feasibleSpace", sink);
      }
    }
  }

  // trial template
  const auto& trial_template = spec.trial_template;
  if (trial_template.worker_count < 1) {
    Report(sink, "trialTemplate.workerCount", "must be >= 1");
  }
  if (!std::isfinite(trial_template.cpu_per_worker) || !(trial_template.cpu_per_worker > 0)) {
    Report(sink, "trialTemplate.cpuPerWorker", "must be > 0");
  }
  if (const auto* sim = std::get_if<SimObjectiveDescriptor>(&trial_template.payload)) {
    if (sim->duration_ticks < 1) {
      Report(sink, "trialTemplate.simulatedObjective.durationTicks", "must be >= 1");
    }
    if (!std::isfinite(sim->noise_stddev) || sim->noise_stddev < 0) {
      Report(sink, "trialTemplate.simulatedObjective.noiseStdDev", "must be finite and >= 0");
    }
    if (!context.simulated_functions.contains(sim->function_name)) {
      Report(sink, "trialTemplate.simulatedObjective.functionName",
             absl::StrCat("unknown simulated objective '", sim->function_name, "'"));
    }
  } else {
    const auto& command = std::get<CommandTemplate>(trial_template.payload).command;
    if (command.empty()) {
      Report(sink, "trialTemplate.command", "command must be non-empty");
    }
    auto placeholders = ListPlaceholders(command);
    if (!placeholders.ok()) {
      Report(sink, "trialTemplate.command", std::string(placeholders.status().message()));
    } else {
      const bool hyperband = spec.algorithm.algorithm_name == "hyperband";
      for (const auto& name : *placeholders) {
        const bool builtin = name == kTrialNamePlaceholder ||
                             name == kTrialNamespacePlaceholder ||
                             name == kHyperparametersPlaceholder ||
                             (hyperband && name == kBudgetParameter);
        if (!builtin && !names.contains(name)) {
          Report(sink, "trialTemplate.command",
                 absl::StrCat("unresolved placeholder ${", name, "}"));
        }
      }
    }
  }
  return sink;
}

}  // namespace tunectl
