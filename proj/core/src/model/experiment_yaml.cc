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

#include "tunectl/model/experiment_yaml.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "tunectl/common/numeric_format.h"

namespace tunectl {
namespace {

// Walks a YAML tree collecting structural issues with source positions.
class Reader {
 public:
  void Issue(const std::string& path, const YAML::Node& at, std::string message) {
    ValidationIssue issue{path, std::move(message)};
    const YAML::Mark mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    if (!mark.is_null()) {
      issue.line = mark.line + 1;
      issue.column = mark.column + 1;
    }
    issues_.push_back(std::move(issue));
  }

  void Remember(const std::string& path, const YAML::Node& node) {
    if (node.IsDefined() && !node.Mark().is_null()) marks_[path] = node.Mark();
  }

  // Flags keys outside `allowed`.
  void CheckKeys(const YAML::Node& map, const std::string& path,
                 std::initializer_list<std::string_view> allowed) {
    for (const auto& entry : map) {
      const std::string key = entry.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Issue(Join(path, key), entry.first, absl::StrCat("unknown field '", key, "'"));
      }
    }
  }

  bool ExpectMap(const YAML::Node& node, const std::string& path) {
    Remember(path, node);
    if (!node.IsMap()) {
      Issue(path, node, "expected a mapping");
      return false;
    }
    return true;
  }

  std::optional<std::string> Scalar(const YAML::Node& parent, std::string_view key,
                                    const std::string& path, bool required) {
    const std::string child_path = Join(path, key);
    const YAML::Node node = parent[std::string(key)];
    if (!node.IsDefined() || node.IsNull()) {
      if (required) Issue(child_path, parent, "required field is missing");
      return std::nullopt;
    }
    Remember(child_path, node);
    if (!node.IsScalar()) {
      Issue(child_path, node, "expected a scalar");
      return std::nullopt;
    }
    return node.Scalar();
  }

  template <typename T>
  std::optional<T> Number(const YAML::Node& parent, std::string_view key, const std::string& path,
                          bool required) {
    auto text = Scalar(parent, key, path, required);
    if (!text) return std::nullopt;
    if constexpr (std::is_integral_v<T>) {
      auto value = ParseInt(*text);
      if (!value) {
        Issue(Join(path, key), parent[std::string(key)], absl::StrCat("'", *text, "' is not an integer"));
        return std::nullopt;
      }
      return static_cast<T>(*value);
    } else {
      auto value = ParseDouble(*text);
      if (!value) {
        Issue(Join(path, key), parent[std::string(key)], absl::StrCat("'", *text, "' is not a number"));
        return std::nullopt;
      }
      return *value;
    }
  }

  template <typename Enum>
  std::optional<Enum> EnumField(const YAML::Node& parent, std::string_view key,
                                const std::string& path, bool required,
                                std::optional<Enum> (*parse)(std::string_view)) {
    auto text = Scalar(parent, key, path, required);
    if (!text) return std::nullopt;
    auto value = parse(*text);
    if (!value) {
      Issue(Join(path, key), parent[std::string(key)], absl::StrCat("invalid value '", *text, "'"));
    }
    return value;
  }

  std::vector<std::string> StringList(const YAML::Node& parent, std::string_view key,
                                      const std::string& path) {
    std::vector<std::string> out;
    const std::string child_path = Join(path, key);
    const YAML::Node node = parent[std::string(key)];
    if (!node.IsDefined() || node.IsNull()) return out;
    Remember(child_path, node);
    if (!node.IsSequence()) {
      Issue(child_path, node, "expected a sequence");
      return out;
    }
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].IsScalar()) {
        Issue(absl::StrCat(child_path, "[", i, "]"), node[i], "expected a scalar");
        continue;
      }
      out.push_back(node[i].Scalar());
    }
    return out;
  }

  // Attaches positions to issues that only carry a path.
  void Locate(IssueSink& issues) const {
    for (auto& issue : issues) {
      if (issue.line > 0) continue;
      std::string path = issue.path;
      while (true) {
        if (auto it = marks_.find(path); it != marks_.end()) {
          issue.line = it->second.line + 1;
          issue.column = it->second.column + 1;
          break;
        }
        const std::size_t cut = path.find_last_of(".[");
        if (cut == std::string::npos || cut == 0) break;
        path.resize(cut);
      }
    }
  }

  IssueSink& issues() { return issues_; }

  static std::string Join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : absl::StrCat(path, ".", std::string(key));
  }

 private:
  IssueSink issues_;
  std::map<std::string, YAML::Mark> marks_;
};

void ReadObjective(Reader& reader, const YAML::Node& node, ObjectiveSpec& objective) {
  const std::string path = "objective";
  if (!node.IsDefined()) {
    reader.Issue(path, node, "required field is missing");
    return;
  }
  if (!reader.ExpectMap(node, path)) return;
  reader.CheckKeys(node, path,
                   {"type", "goal", "objectiveMetricName", "additionalMetricNames",
                    "metricStrategy"});
  if (auto type = reader.EnumField(node, "type", path, true, ParseObjectiveType)) {
    objective.type = *type;
  }
  objective.goal = reader.Number<double>(node, "goal", path, false);
  if (auto name = reader.Scalar(node, "objectiveMetricName", path, true)) {
    objective.objective_metric_name = *name;
  }
  objective.additional_metric_names = reader.StringList(node, "additionalMetricNames", path);
  if (auto strategy = reader.EnumField(node, "metricStrategy", path, false, ParseMetricStrategy)) {
    objective.metric_strategy = *strategy;
  }
}

void ReadAlgorithm(Reader& reader, const YAML::Node& node, AlgorithmSpec& algorithm) {
  const std::string path = "algorithm";
  if (!node.IsDefined()) {
    reader.Issue(path, node, "required field is missing");
    return;
  }
  if (!reader.ExpectMap(node, path)) return;
  reader.CheckKeys(node, path, {"algorithmName", "settings"});
  if (auto name = reader.Scalar(node, "algorithmName", path, true)) {
    algorithm.algorithm_name = *name;
  }
  const YAML::Node settings = node["settings"];
  if (settings.IsDefined() && !settings.IsNull()) {
    if (!reader.ExpectMap(settings, "algorithm.settings")) return;
    for (const auto& entry : settings) {
      const std::string key = entry.first.Scalar();
      const std::string setting_path = absl::StrCat("algorithm.settings.", key);
      reader.Remember(setting_path, entry.second);
      if (!entry.second.IsScalar()) {
        reader.Issue(setting_path, entry.second, "setting values must be scalars");
        continue;
      }
      algorithm.settings[key] = entry.second.Scalar();
    }
  }
}

void ReadParameter(Reader& reader, const YAML::Node& node, const std::string& path,
                   ParameterSpec& parameter) {
  if (!reader.ExpectMap(node, path)) return;
  reader.CheckKeys(node, path, {"name", "parameterType", "feasibleSpace"});
  if (auto name = reader.Scalar(node, "name", path, true)) parameter.name = *name;
  if (auto type = reader.EnumField(node, "parameterType", path, true, ParseParameterType)) {
    parameter.type = *type;
  }
  const std::string space_path = path + ".feasibleSpace";
  const YAML::Node space = node["feasibleSpace"];
  if (!space.IsDefined()) {
    reader.Issue(space_path, node, "required field is missing");
    return;
  }
  if (!reader.ExpectMap(space, space_path)) return;
  reader.CheckKeys(space, space_path, {"min", "max", "step", "list"});
  if (space["list"].IsDefined()) {
    ValueList list;
    list.values = reader.StringList(space, "list", space_path);
    if (parameter.type == ParameterType::kDiscrete) {
      // Numbers are stored in shortest round-trip form.
      for (auto& value : list.values) {
        if (auto number = ParseDouble(value); number && std::isfinite(*number)) {
          value = FormatDouble(*number);
        }
      }
    }
    if (space["min"].IsDefined() || space["max"].IsDefined()) {
      reader.Issue(space_path, space, "use either list or min/max, not both");
    }
    parameter.feasible_space = std::move(list);
  } else {
    Range range;
    auto min = reader.Number<double>(space, "min", space_path, true);
    auto max = reader.Number<double>(space, "max", space_path, true);
    range.min = min.value_or(0.0);
    range.max = max.value_or(range.min + 1.0);
    range.step = reader.Number<double>(space, "step", space_path, false);
    parameter.feasible_space = range;
  }
}

void ReadTrialTemplate(Reader& reader, const YAML::Node& node, TrialTemplate& trial_template) {
  const std::string path = "trialTemplate";
  if (!node.IsDefined()) {
    reader.Issue(path, node, "required field is missing");
    return;
  }
  if (!reader.ExpectMap(node, path)) return;
  reader.CheckKeys(node, path,
                   {"kind", "workerCount", "cpuPerWorker", "restartPolicy", "command",
                    "simulatedObjective"});
  auto kind = reader.EnumField(node, "kind", path, true, ParseTrialKind);
  if (auto workers = reader.Number<int>(node, "workerCount", path, false)) {
    trial_template.worker_count = *workers;
  }
  if (auto cpu = reader.Number<double>(node, "cpuPerWorker", path, false)) {
    trial_template.cpu_per_worker = *cpu;
  }
  if (auto policy = reader.EnumField(node, "restartPolicy", path, false, ParseRestartPolicy)) {
    trial_template.restart_policy = *policy;
  }
  if (!kind) return;
  if (*kind == TrialKind::kLocalProcess) {
    if (node["simulatedObjective"].IsDefined()) {
      reader.Issue(path + ".simulatedObjective", node["simulatedObjective"],
                   "not allowed for kind local-process");
    }
    CommandTemplate command;
    if (auto text = reader.Scalar(node, "command", path, true)) command.command = *text;
    trial_template.payload = std::move(command);
    return;
  }
  if (node["command"].IsDefined()) {
    reader.Issue(path + ".command", node["command"], "not allowed for kind simulated");
  }
  SimObjectiveDescriptor sim;
  const std::string sim_path = path + ".simulatedObjective";
  const YAML::Node sim_node = node["simulatedObjective"];
  if (!sim_node.IsDefined()) {
    reader.Issue(sim_path, node, "required field is missing");
  } else if (reader.ExpectMap(sim_node, sim_path)) {
    reader.CheckKeys(sim_node, sim_path,
                     {"functionName", "durationTicks", "noiseStdDev", "rngSeedOffset"});
    if (auto name = reader.Scalar(sim_node, "functionName", sim_path, true)) {
      sim.function_name = *name;
    }
    if (auto ticks = reader.Number<std::int64_t>(sim_node, "durationTicks", sim_path, false)) {
      sim.duration_ticks = *ticks;
    }
    if (auto noise = reader.Number<double>(sim_node, "noiseStdDev", sim_path, false)) {
      sim.noise_stddev = *noise;
    }
    if (auto offset = reader.Number<std::int64_t>(sim_node, "rngSeedOffset", sim_path, false)) {
      sim.rng_seed_offset = *offset;
    }
  }
  trial_template.payload = std::move(sim);
}

ExperimentSpec ReadExperiment(Reader& reader, const YAML::Node& root) {
  ExperimentSpec spec;
  if (!reader.ExpectMap(root, "")) return spec;
  reader.CheckKeys(root, "",
                   {"name", "namespace", "objective", "algorithm", "parallelTrialCount",
                    "maxTrialCount", "maxFailedTrialCount", "metricCollectorKind", "parameters",
                    "trialTemplate"});
  if (auto name = reader.Scalar(root, "name", "", true)) spec.name = *name;
  if (auto ns = reader.Scalar(root, "namespace", "", false)) spec.namespace_name = *ns;
  ReadObjective(reader, root["objective"], spec.objective);
  ReadAlgorithm(reader, root["algorithm"], spec.algorithm);
  if (auto parallel = reader.Number<int>(root, "parallelTrialCount", "", true)) {
    spec.parallel_trial_count = *parallel;
  }
  if (auto max = reader.Number<int>(root, "maxTrialCount", "", true)) {
    spec.max_trial_count = *max;
  }
  if (auto failed = reader.Number<int>(root, "maxFailedTrialCount", "", false)) {
    spec.max_failed_trial_count = *failed;
  }
  if (auto kind = reader.EnumField(root, "metricCollectorKind", "", false,
                                   ParseMetricCollectorKind)) {
    spec.metric_collector_kind = *kind;
  }
  const YAML::Node parameters = root["parameters"];
  if (!parameters.IsDefined() || parameters.IsNull()) {
    reader.Issue("parameters", root, "required field is missing");
  } else if (!parameters.IsSequence()) {
    reader.Issue("parameters", parameters, "expected a sequence");
  } else {
    reader.Remember("parameters", parameters);
    for (std::size_t i = 0; i < parameters.size(); ++i) {
      ParameterSpec parameter;
      ReadParameter(reader, parameters[i], absl::StrCat("parameters[", i, "]"), parameter);
      spec.parameters.push_back(std::move(parameter));
    }
  }
  ReadTrialTemplate(reader, root["trialTemplate"], spec.trial_template);
  return spec;
}

absl::Status IssuesToStatus(const IssueSink& issues) {
  std::vector<std::string> lines;
  lines.reserve(issues.size());
  for (const auto& issue : issues) lines.push_back(issue.ToString());
  return absl::InvalidArgumentError(absl::StrCat(issues.size(), " validation error(s):\n  ",
                                                 absl::StrJoin(lines, "\n  ")));
}

absl::StatusOr<ExperimentSpec> FinishParse(Reader& reader, ExperimentSpec spec,
                                           const ValidationContext& context, IssueSink* out) {
  IssueSink& issues = reader.issues();
  std::set<std::string> structural_paths;
  for (const auto& issue : issues) structural_paths.insert(issue.path);
  for (auto& issue : ValidateExperiment(spec, context)) {
    // A field that failed to parse already has an issue; skip derived noise.
    if (structural_paths.contains(issue.path)) continue;
    issues.push_back(std::move(issue));
  }
  reader.Locate(issues);
  if (out != nullptr) *out = issues;
  if (!issues.empty()) return IssuesToStatus(issues);
  return spec;
}

void EmitScalar(YAML::Emitter& out, std::string_view key, const std::string& value) {
  out << YAML::Key << std::string(key) << YAML::Value << value;
}

}  // namespace

absl::StatusOr<ExperimentSpec> ParseExperiment(std::string_view text,
                                               const ValidationContext& context) {
  return ParseExperiment(text, context, nullptr);
}

absl::StatusOr<ExperimentSpec> ParseExperiment(std::string_view text,
                                               const ValidationContext& context,
                                               IssueSink* issues) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    ValidationIssue issue{"", absl::StrCat("yaml syntax error: ", e.msg), e.mark.line + 1,
                          e.mark.column + 1};
    if (issues != nullptr) *issues = {issue};
    return absl::InvalidArgumentError(issue.ToString());
  }
  Reader reader;
  ExperimentSpec spec = ReadExperiment(reader, root);
  return FinishParse(reader, std::move(spec), context, issues);
}

absl::StatusOr<ExperimentSpec> ExperimentFromNode(const YAML::Node& node,
                                                  const ValidationContext& context) {
  Reader reader;
  ExperimentSpec spec = ReadExperiment(reader, node);
  return FinishParse(reader, std::move(spec), context, nullptr);
}

void EmitExperiment(YAML::Emitter& out, const ExperimentSpec& spec) {
  out << YAML::BeginMap;
  EmitScalar(out, "name", spec.name);
  EmitScalar(out, "namespace", spec.namespace_name);

  out << YAML::Key << "objective" << YAML::Value << YAML::BeginMap;
  EmitScalar(out, "type", std::string(ToString(spec.objective.type)));
  if (spec.objective.goal) EmitScalar(out, "goal", FormatDouble(*spec.objective.goal));
  EmitScalar(out, "objectiveMetricName", spec.objective.objective_metric_name);
  out << YAML::Key << "additionalMetricNames" << YAML::Value;
  if (spec.objective.additional_metric_names.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
  } else {
    out << YAML::BeginSeq;
    for (const auto& metric : spec.objective.additional_metric_names) out << metric;
    out << YAML::EndSeq;
  }
  EmitScalar(out, "metricStrategy", std::string(ToString(spec.objective.metric_strategy)));
  out << YAML::EndMap;

  out << YAML::Key << "algorithm" << YAML::Value << YAML::BeginMap;
  EmitScalar(out, "algorithmName", spec.algorithm.algorithm_name);
  out << YAML::Key << "settings" << YAML::Value;
  if (spec.algorithm.settings.empty()) {
    out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
  } else {
    out << YAML::BeginMap;
    for (const auto& [key, value] : spec.algorithm.settings) EmitScalar(out, key, value);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  EmitScalar(out, "parallelTrialCount", std::to_string(spec.parallel_trial_count));
  EmitScalar(out, "maxTrialCount", std::to_string(spec.max_trial_count));
  EmitScalar(out, "maxFailedTrialCount", std::to_string(spec.max_failed_trial_count));
  EmitScalar(out, "metricCollectorKind", std::string(ToString(spec.metric_collector_kind)));

  out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
  for (const auto& parameter : spec.parameters) {
    out << YAML::BeginMap;
    EmitScalar(out, "name", parameter.name);
    EmitScalar(out, "parameterType", std::string(ToString(parameter.type)));
    out << YAML::Key << "feasibleSpace" << YAML::Value << YAML::BeginMap;
    if (const auto* range = parameter.range()) {
      EmitScalar(out, "min", FormatDouble(range->min));
      EmitScalar(out, "max", FormatDouble(range->max));
      if (range->step) EmitScalar(out, "step", FormatDouble(*range->step));
    } else {
      out << YAML::Key << "list" << YAML::Value << YAML::BeginSeq;
      for (const auto& value : parameter.list()->values) out << value;
      out << YAML::EndSeq;
    }
    out << YAML::EndMap << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& trial_template = spec.trial_template;
  out << YAML::Key << "trialTemplate" << YAML::Value << YAML::BeginMap;
  EmitScalar(out, "kind", std::string(ToString(trial_template.kind())));
  EmitScalar(out, "workerCount", std::to_string(trial_template.worker_count));
  EmitScalar(out, "cpuPerWorker", FormatDouble(trial_template.cpu_per_worker));
  EmitScalar(out, "restartPolicy", std::string(ToString(trial_template.restart_policy)));
  if (const auto* sim = std::get_if<SimObjectiveDescriptor>(&trial_template.payload)) {
    out << YAML::Key << "simulatedObjective" << YAML::Value << YAML::BeginMap;
    EmitScalar(out, "functionName", sim->function_name);
    EmitScalar(out, "durationTicks", std::to_string(sim->duration_ticks));
    EmitScalar(out, "noiseStdDev", FormatDouble(sim->noise_stddev));
    EmitScalar(out, "rngSeedOffset", std::to_string(sim->rng_seed_offset));
    out << YAML::EndMap;
  } else {
    EmitScalar(out, "command", std::get<CommandTemplate>(trial_template.payload).command);
  }
  out << YAML::EndMap;

  out << YAML::EndMap;
}

std::string CanonicalYaml(const ExperimentSpec& spec) {
  YAML::Emitter out;
  EmitExperiment(out, spec);
  return std::string(out.c_str()) + "\n";
}

void EmitAssignments(YAML::Emitter& out, const AssignmentSet& assignments) {
  if (assignments.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
    return;
  }
  out << YAML::BeginSeq;
  for (const auto& assignment : assignments) {
    out << YAML::BeginMap;
    EmitScalar(out, "name", assignment.name);
    EmitScalar(out, "value", assignment.value);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

absl::StatusOr<AssignmentSet> AssignmentsFromNode(const YAML::Node& node) {
  AssignmentSet out;
  if (!node.IsDefined() || node.IsNull()) return out;
  if (!node.IsSequence()) return absl::InvalidArgumentError("assignments must be a sequence");
  for (const auto& entry : node) {
    if (!entry.IsMap() || !entry["name"].IsScalar() || !entry["value"].IsScalar()) {
      return absl::InvalidArgumentError("assignment entries need scalar name and value");
    }
    out.push_back({entry["name"].Scalar(), entry["value"].Scalar()});
  }
  return out;
}

}  // namespace tunectl
