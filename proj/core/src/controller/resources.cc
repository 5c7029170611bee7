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

#include "tunectl/controller/resources.h"

#include <yaml-cpp/yaml.h>

#include <array>
#include <cstdio>
#include <utility>

#include "absl/strings/str_cat.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/model/experiment_yaml.h"

namespace tunectl::controller {
namespace {

constexpr std::array<std::pair<ExperimentPhase, std::string_view>, 4> kExperimentPhases = {{
    {ExperimentPhase::kCreated, "Created"},
    {ExperimentPhase::kRunning, "Running"},
    {ExperimentPhase::kSucceeded, "Succeeded"},
    {ExperimentPhase::kFailed, "Failed"},
}};

constexpr std::array<std::pair<TrialPhase, std::string_view>, 5> kTrialPhases = {{
    {TrialPhase::kCreated, "Created"},
    {TrialPhase::kPending, "Pending"},
    {TrialPhase::kRunning, "Running"},
    {TrialPhase::kSucceeded, "Succeeded"},
    {TrialPhase::kFailed, "Failed"},
}};

void Key(YAML::Emitter& out, std::string_view key, const std::string& value) {
  out << YAML::Key << std::string(key) << YAML::Value << value;
}

void Key(YAML::Emitter& out, std::string_view key, std::string_view value) {
  Key(out, key, std::string(value));
}

void Key(YAML::Emitter& out, std::string_view key, std::int64_t value) {
  Key(out, key, std::to_string(value));
}

void KeyDouble(YAML::Emitter& out, std::string_view key, double value) {
  Key(out, key, FormatDouble(value));
}

void Bool(YAML::Emitter& out, std::string_view key, bool value) {
  Key(out, key, std::string(value ? "true" : "false"));
}

// Typed field access that turns any yaml-cpp failure into a status.
class Fields {
 public:
  explicit Fields(YAML::Node node) : node_(std::move(node)) {}

  absl::StatusOr<std::string> String(std::string_view key, bool required = true) const {
    const YAML::Node child = node_[std::string(key)];
    if (!child.IsDefined() || child.IsNull()) {
      if (required) return Missing(key);
      return std::string();
    }
    if (!child.IsScalar()) return absl::InvalidArgumentError(absl::StrCat("'", std::string(key), "' must be a scalar"));
    return child.Scalar();
  }

  absl::StatusOr<std::int64_t> Int(std::string_view key) const {
    TUNECTL_ASSIGN_OR_RETURN(std::string text, String(key));
    auto value = ParseInt(text);
    if (!value) return Invalid(key, text);
    return *value;
  }

  absl::StatusOr<double> Double(std::string_view key) const {
    TUNECTL_ASSIGN_OR_RETURN(std::string text, String(key));
    auto value = ParseDouble(text);
    if (!value) return Invalid(key, text);
    return *value;
  }

  absl::StatusOr<std::optional<double>> OptionalDouble(std::string_view key) const {
    if (!Has(key)) return std::optional<double>();
    TUNECTL_ASSIGN_OR_RETURN(double value, Double(key));
    return std::optional<double>(value);
  }

  absl::StatusOr<bool> Bool(std::string_view key) const {
    TUNECTL_ASSIGN_OR_RETURN(std::string text, String(key));
    if (text == "true") return true;
    if (text == "false") return false;
    return Invalid(key, text);
  }

  bool Has(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    return child.IsDefined() && !child.IsNull();
  }

  YAML::Node Node(std::string_view key) const { return node_[std::string(key)]; }

 private:
  static absl::Status Missing(std::string_view key) {
    return absl::InvalidArgumentError(absl::StrCat("missing field '", std::string(key), "'"));
  }
  static absl::Status Invalid(std::string_view key, const std::string& text) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid value '", text, "' for '", std::string(key), "'"));
  }

  YAML::Node node_;
};

void EmitOptimal(YAML::Emitter& out, const OptimalTrial& optimal) {
  out << YAML::BeginMap;
  Key(out, "trialName", optimal.trial_name);
  out << YAML::Key << "parameterAssignments" << YAML::Value;
  EmitAssignments(out, optimal.assignments);
  KeyDouble(out, "objectiveValue", optimal.objective_value);
  out << YAML::EndMap;
}

void EmitSimDescriptor(YAML::Emitter& out, const SimObjectiveDescriptor& sim) {
  out << YAML::BeginMap;
  Key(out, "functionName", sim.function_name);
  Key(out, "durationTicks", sim.duration_ticks);
  KeyDouble(out, "noiseStdDev", sim.noise_stddev);
  Key(out, "rngSeedOffset", sim.rng_seed_offset);
  out << YAML::EndMap;
}

void EmitExperimentResource(YAML::Emitter& out, const ExperimentResource& experiment) {
  Key(out, "kind", std::string("Experiment"));
  out << YAML::Key << "spec" << YAML::Value;
  EmitExperiment(out, experiment.spec);
  const ExperimentStatus& status = experiment.status;
  out << YAML::Key << "status" << YAML::Value << YAML::BeginMap;
  Key(out, "phase", ToString(status.phase));
  Key(out, "trialsSpawned", status.trials_spawned);
  Key(out, "trialsPending", status.trials_pending);
  Key(out, "trialsRunning", status.trials_running);
  Key(out, "trialsSucceeded", status.trials_succeeded);
  Key(out, "trialsFailed", status.trials_failed);
  if (status.current_optimal) {
    out << YAML::Key << "currentOptimal" << YAML::Value;
    EmitOptimal(out, *status.current_optimal);
  }
  Key(out, "message", status.message);
  out << YAML::EndMap;
}

void EmitSuggestionResource(YAML::Emitter& out, const SuggestionResource& suggestion) {
  Key(out, "kind", std::string("Suggestion"));
  out << YAML::Key << "spec" << YAML::Value << YAML::BeginMap;
  Key(out, "experimentName", suggestion.spec.experiment_name);
  Key(out, "algorithmName", suggestion.spec.algorithm_name);
  Key(out, "requested", suggestion.spec.requested);
  out << YAML::EndMap;
  const SuggestionStatus& status = suggestion.status;
  out << YAML::Key << "status" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "suggestions" << YAML::Value;
  if (status.produced.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
  } else {
    out << YAML::BeginSeq;
    for (const auto& produced : status.produced) {
      out << YAML::BeginMap;
      out << YAML::Key << "parameterAssignments" << YAML::Value;
      EmitAssignments(out, produced.assignments);
      Key(out, "trialName", produced.trial_name);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  Key(out, "algorithmState", status.algorithm_state);
  Bool(out, "serviceReady", status.service_ready);
  Bool(out, "exhausted", status.exhausted);
  Key(out, "error", status.error);
  out << YAML::EndMap;
}

void EmitTrialResource(YAML::Emitter& out, const TrialResource& trial) {
  Key(out, "kind", std::string("Trial"));
  const TrialSpec& spec = trial.spec;
  out << YAML::Key << "spec" << YAML::Value << YAML::BeginMap;
  Key(out, "experimentName", spec.experiment_name);
  Key(out, "index", spec.index);
  Key(out, "trialName", spec.run_spec.trial_name);
  Key(out, "namespace", spec.run_spec.namespace_name);
  out << YAML::Key << "parameterAssignments" << YAML::Value;
  EmitAssignments(out, spec.run_spec.parameter_assignments);
  if (const auto* sim = std::get_if<SimObjectiveDescriptor>(&spec.run_spec.resolved_payload)) {
    out << YAML::Key << "simulatedObjective" << YAML::Value;
    EmitSimDescriptor(out, *sim);
  } else {
    Key(out, "command", std::get<std::string>(spec.run_spec.resolved_payload));
  }
  KeyDouble(out, "resourceFraction", spec.run_spec.resource_fraction);
  Key(out, "workerCount", spec.worker_count);
  KeyDouble(out, "cpuPerWorker", spec.cpu_per_worker);
  Key(out, "restartPolicy", ToString(spec.restart_policy));
  Key(out, "renderError", spec.render_error);
  out << YAML::EndMap;

  const TrialStatus& status = trial.status;
  out << YAML::Key << "status" << YAML::Value << YAML::BeginMap;
  Key(out, "phase", ToString(status.phase));
  Key(out, "restartCount", status.restart_count);
  if (status.observation) KeyDouble(out, "observation", *status.observation);
  out << YAML::Key << "additionalMetrics" << YAML::Value;
  if (status.additional_metrics.empty()) {
    out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
  } else {
    out << YAML::BeginMap;
    for (const auto& [name, value] : status.additional_metrics) KeyDouble(out, name, value);
    out << YAML::EndMap;
  }
  Key(out, "reason", status.reason);
  if (status.finish_time) Key(out, "finishTime", *status.finish_time);
  Key(out, "submitFailures", status.submit_failures);
  Key(out, "nextSubmitTime", status.next_submit_time);
  out << YAML::EndMap;
}

absl::StatusOr<OptimalTrial> OptimalFromNode(const YAML::Node& node) {
  Fields f(node);
  OptimalTrial optimal;
  TUNECTL_ASSIGN_OR_RETURN(optimal.trial_name, f.String("trialName"));
  TUNECTL_ASSIGN_OR_RETURN(optimal.assignments, AssignmentsFromNode(f.Node("parameterAssignments")));
  TUNECTL_ASSIGN_OR_RETURN(optimal.objective_value, f.Double("objectiveValue"));
  return optimal;
}

absl::StatusOr<Resource> ExperimentFromYaml(const YAML::Node& root,
                                            const ValidationContext& context) {
  ExperimentResource experiment;
  TUNECTL_ASSIGN_OR_RETURN(experiment.spec, ExperimentFromNode(root["spec"], context));
  Fields f(root["status"]);
  ExperimentStatus& status = experiment.status;
  TUNECTL_ASSIGN_OR_RETURN(std::string phase, f.String("phase"));
  auto parsed_phase = ParseExperimentPhase(phase);
  if (!parsed_phase) return absl::InvalidArgumentError(absl::StrCat("unknown phase ", phase));
  status.phase = *parsed_phase;
  TUNECTL_ASSIGN_OR_RETURN(status.trials_spawned, f.Int("trialsSpawned"));
  TUNECTL_ASSIGN_OR_RETURN(status.trials_pending, f.Int("trialsPending"));
  TUNECTL_ASSIGN_OR_RETURN(status.trials_running, f.Int("trialsRunning"));
  TUNECTL_ASSIGN_OR_RETURN(status.trials_succeeded, f.Int("trialsSucceeded"));
  TUNECTL_ASSIGN_OR_RETURN(status.trials_failed, f.Int("trialsFailed"));
  if (f.Has("currentOptimal")) {
    TUNECTL_ASSIGN_OR_RETURN(status.current_optimal, OptimalFromNode(f.Node("currentOptimal")));
  }
  TUNECTL_ASSIGN_OR_RETURN(status.message, f.String("message", false));
  return experiment;
}

absl::StatusOr<Resource> SuggestionFromYaml(const YAML::Node& root) {
  SuggestionResource suggestion;
  Fields spec(root["spec"]);
  TUNECTL_ASSIGN_OR_RETURN(suggestion.spec.experiment_name, spec.String("experimentName"));
  TUNECTL_ASSIGN_OR_RETURN(suggestion.spec.algorithm_name, spec.String("algorithmName"));
  TUNECTL_ASSIGN_OR_RETURN(suggestion.spec.requested, spec.Int("requested"));
  Fields f(root["status"]);
  SuggestionStatus& status = suggestion.status;
  const YAML::Node list = f.Node("suggestions");
  if (list.IsDefined() && list.IsSequence()) {
    for (const auto& entry : list) {
      Fields item(entry);
      ProducedAssignment produced;
      TUNECTL_ASSIGN_OR_RETURN(produced.assignments,
                               AssignmentsFromNode(item.Node("parameterAssignments")));
      TUNECTL_ASSIGN_OR_RETURN(produced.trial_name, item.String("trialName", false));
      status.produced.push_back(std::move(produced));
    }
  }
  TUNECTL_ASSIGN_OR_RETURN(status.algorithm_state, f.String("algorithmState", false));
  TUNECTL_ASSIGN_OR_RETURN(status.service_ready, f.Bool("serviceReady"));
  TUNECTL_ASSIGN_OR_RETURN(status.exhausted, f.Bool("exhausted"));
  TUNECTL_ASSIGN_OR_RETURN(status.error, f.String("error", false));
  return suggestion;
}

absl::StatusOr<Resource> TrialFromYaml(const YAML::Node& root) {
  TrialResource trial;
  Fields spec(root["spec"]);
  TrialSpec& s = trial.spec;
  TUNECTL_ASSIGN_OR_RETURN(s.experiment_name, spec.String("experimentName"));
  TUNECTL_ASSIGN_OR_RETURN(s.index, spec.Int("index"));
  TUNECTL_ASSIGN_OR_RETURN(s.run_spec.trial_name, spec.String("trialName"));
  TUNECTL_ASSIGN_OR_RETURN(s.run_spec.namespace_name, spec.String("namespace"));
  TUNECTL_ASSIGN_OR_RETURN(s.run_spec.parameter_assignments,
                           AssignmentsFromNode(spec.Node("parameterAssignments")));
  if (spec.Has("simulatedObjective")) {
    Fields sim(spec.Node("simulatedObjective"));
    SimObjectiveDescriptor descriptor;
    TUNECTL_ASSIGN_OR_RETURN(descriptor.function_name, sim.String("functionName"));
    TUNECTL_ASSIGN_OR_RETURN(descriptor.duration_ticks, sim.Int("durationTicks"));
    TUNECTL_ASSIGN_OR_RETURN(descriptor.noise_stddev, sim.Double("noiseStdDev"));
    TUNECTL_ASSIGN_OR_RETURN(descriptor.rng_seed_offset, sim.Int("rngSeedOffset"));
    s.run_spec.resolved_payload = std::move(descriptor);
  } else {
    TUNECTL_ASSIGN_OR_RETURN(std::string command, spec.String("command", false));
    s.run_spec.resolved_payload = std::move(command);
  }
  TUNECTL_ASSIGN_OR_RETURN(s.run_spec.resource_fraction, spec.Double("resourceFraction"));
  TUNECTL_ASSIGN_OR_RETURN(s.worker_count, spec.Int("workerCount"));
  TUNECTL_ASSIGN_OR_RETURN(s.cpu_per_worker, spec.Double("cpuPerWorker"));
  TUNECTL_ASSIGN_OR_RETURN(std::string policy, spec.String("restartPolicy"));
  auto parsed_policy = ParseRestartPolicy(policy);
  if (!parsed_policy) return absl::InvalidArgumentError(absl::StrCat("unknown policy ", policy));
  s.restart_policy = *parsed_policy;
  TUNECTL_ASSIGN_OR_RETURN(s.render_error, spec.String("renderError", false));

  Fields f(root["status"]);
  TrialStatus& status = trial.status;
  TUNECTL_ASSIGN_OR_RETURN(std::string phase, f.String("phase"));
  auto parsed_phase = ParseTrialPhase(phase);
  if (!parsed_phase) return absl::InvalidArgumentError(absl::StrCat("unknown phase ", phase));
  status.phase = *parsed_phase;
  TUNECTL_ASSIGN_OR_RETURN(status.restart_count, f.Int("restartCount"));
  TUNECTL_ASSIGN_OR_RETURN(status.observation, f.OptionalDouble("observation"));
  const YAML::Node metrics = f.Node("additionalMetrics");
  if (metrics.IsDefined() && metrics.IsMap()) {
    for (const auto& entry : metrics) {
      auto value = ParseDouble(entry.second.Scalar());
      if (!value) return absl::InvalidArgumentError("bad additional metric value");
      status.additional_metrics[entry.first.Scalar()] = *value;
    }
  }
  TUNECTL_ASSIGN_OR_RETURN(status.reason, f.String("reason", false));
  if (f.Has("finishTime")) {
    TUNECTL_ASSIGN_OR_RETURN(std::int64_t finish, f.Int("finishTime"));
    status.finish_time = finish;
  }
  TUNECTL_ASSIGN_OR_RETURN(status.submit_failures, f.Int("submitFailures"));
  TUNECTL_ASSIGN_OR_RETURN(status.next_submit_time, f.Int("nextSubmitTime"));
  return trial;
}

}  // namespace

std::string_view ToString(ExperimentPhase phase) {
  for (const auto& [value, name] : kExperimentPhases) {
    if (value == phase) return name;
  }
  return "Unknown";
}

std::string_view ToString(TrialPhase phase) {
  for (const auto& [value, name] : kTrialPhases) {
    if (value == phase) return name;
  }
  return "Unknown";
}

std::optional<ExperimentPhase> ParseExperimentPhase(std::string_view text) {
  for (const auto& [value, name] : kExperimentPhases) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::optional<TrialPhase> ParseTrialPhase(std::string_view text) {
  for (const auto& [value, name] : kTrialPhases) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::string ExperimentKey(std::string_view ns, std::string_view name) {
  return absl::StrCat(std::string(kExperimentPrefix), std::string(ns), "/", std::string(name));
}

std::string SuggestionKey(std::string_view ns, std::string_view experiment) {
  return absl::StrCat(std::string(kSuggestionPrefix), std::string(ns), "/", std::string(experiment));
}

std::string TrialPrefix(std::string_view ns, std::string_view experiment) {
  return absl::StrCat(std::string(kTrialPrefix), std::string(ns), "/", std::string(experiment), "/");
}

std::string TrialKey(std::string_view ns, std::string_view experiment, std::string_view trial) {
  return absl::StrCat(TrialPrefix(ns, experiment), std::string(trial));
}

std::string TrialName(std::string_view experiment, int index) {
  char digits[16];
  std::snprintf(digits, sizeof(digits), "%04d", index);
  return absl::StrCat(std::string(experiment), "-", digits);
}

std::string ResourceToYaml(const Resource& resource) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  std::visit(
      [&out](const auto& value) {
        using T = std::decay_t<decltype(value)>;
        if constexpr (std::is_same_v<T, ExperimentResource>) {
          EmitExperimentResource(out, value);
        } else if constexpr (std::is_same_v<T, SuggestionResource>) {
          EmitSuggestionResource(out, value);
        } else {
          EmitTrialResource(out, value);
        }
      },
      resource);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

absl::StatusOr<Resource> ResourceFromYaml(std::string_view text,
                                          const ValidationContext& context) {
  try {
    const YAML::Node root = YAML::Load(std::string(text));
    const std::string kind = root["kind"].IsScalar() ? root["kind"].Scalar() : "";
    if (kind == "Experiment") return ExperimentFromYaml(root, context);
    if (kind == "Suggestion") return SuggestionFromYaml(root);
    if (kind == "Trial") return TrialFromYaml(root);
    return absl::InvalidArgumentError(absl::StrCat("unknown resource kind '", kind, "'"));
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("unreadable resource: ", e.what()));
  }
}

}  // namespace tunectl::controller
