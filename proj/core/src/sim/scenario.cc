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

#include "tunectl/sim/scenario.h"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "absl/strings/str_cat.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/controller/control_loop.h"
#include "tunectl/model/experiment_yaml.h"

namespace tunectl::sim {
namespace {

absl::Status CheckKeys(const YAML::Node& node, std::string_view where,
                       const std::set<std::string>& allowed) {
  if (!node.IsMap()) return absl::InvalidArgumentError(absl::StrCat(std::string(where), " must be a map"));
  for (const auto& entry : node) {
    const std::string key = entry.first.as<std::string>();
    if (allowed.count(key) == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(where), ": unknown field '", key, "' at line ",
                       entry.first.Mark().line + 1));
    }
  }
  return absl::OkStatus();
}

template <typename T>
absl::StatusOr<T> Read(const YAML::Node& map, const std::string& key, T fallback) {
  const YAML::Node node = map[key];
  if (!node) return fallback;
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", key, "' at line ", node.Mark().line + 1, " has the wrong type"));
  }
}

absl::StatusOr<ClusterConfig> ReadCluster(const YAML::Node& node) {
  TUNECTL_RETURN_IF_ERROR(CheckKeys(node, "cluster", {"gangScheduling", "nodes", "namespaces"}));
  ClusterConfig config;
  TUNECTL_ASSIGN_OR_RETURN(config.gang_scheduling, Read<bool>(node, "gangScheduling", false));
  for (const auto& group : node["nodes"]) {
    TUNECTL_RETURN_IF_ERROR(CheckKeys(group, "cluster.nodes[]", {"count", "cpu"}));
    NodeGroup g;
    TUNECTL_ASSIGN_OR_RETURN(g.count, Read<int>(group, "count", 1));
    TUNECTL_ASSIGN_OR_RETURN(g.cpu, Read<double>(group, "cpu", 0.0));
    config.nodes.push_back(g);
  }
  for (const auto& ns : node["namespaces"]) {
    TUNECTL_RETURN_IF_ERROR(CheckKeys(ns, "cluster.namespaces[]", {"name", "cpuLimit"}));
    NamespaceQuota quota;
    TUNECTL_ASSIGN_OR_RETURN(quota.name, Read<std::string>(ns, "name", ""));
    if (ns["cpuLimit"]) {
      TUNECTL_ASSIGN_OR_RETURN(double limit, Read<double>(ns, "cpuLimit", 0.0));
      quota.cpu_limit = limit;
    }
    config.namespaces.push_back(std::move(quota));
  }
  return config;
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

absl::StatusOr<Scenario> ParseScenario(std::string_view text, const std::filesystem::path& base_dir,
                                       const ValidationContext& context) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    return absl::InvalidArgumentError(absl::StrCat("yaml syntax error at line ", e.mark.line + 1,
                                                   ", column ", e.mark.column + 1, ": ", e.msg));
  }
  TUNECTL_RETURN_IF_ERROR(CheckKeys(root, "scenario",
                                    {"name", "seed", "maxTicks", "settleTicks", "cluster",
                                     "autoscaler", "chaos", "algorithmServiceCpu", "experiments"}));
  Scenario scenario;
  TUNECTL_ASSIGN_OR_RETURN(scenario.name, Read<std::string>(root, "name", "scenario"));
  TUNECTL_ASSIGN_OR_RETURN(scenario.world.seed, Read<std::uint64_t>(root, "seed", 0));
  TUNECTL_ASSIGN_OR_RETURN(scenario.max_ticks, Read<std::int64_t>(root, "maxTicks", 100000));
  TUNECTL_ASSIGN_OR_RETURN(scenario.world.algorithm_service_cpu,
                           Read<double>(root, "algorithmServiceCpu", 0.5));
  if (!root["cluster"]) return absl::InvalidArgumentError("scenario needs a cluster");
  TUNECTL_ASSIGN_OR_RETURN(scenario.world.cluster, ReadCluster(root["cluster"]));

  if (const YAML::Node a = root["autoscaler"]) {
    TUNECTL_RETURN_IF_ERROR(CheckKeys(
        a, "autoscaler", {"minNodes", "maxNodes", "nodeCpu", "scaleDownGraceTicks"}));
    AutoscalerConfig config;
    TUNECTL_ASSIGN_OR_RETURN(config.min_nodes, Read<int>(a, "minNodes", 1));
    TUNECTL_ASSIGN_OR_RETURN(config.max_nodes, Read<int>(a, "maxNodes", 1));
    TUNECTL_ASSIGN_OR_RETURN(config.node_cpu, Read<double>(a, "nodeCpu", 1.0));
    TUNECTL_ASSIGN_OR_RETURN(config.scale_down_grace_ticks,
                             Read<std::int64_t>(a, "scaleDownGraceTicks", 10));
    scenario.world.autoscaler = config;
    scenario.settle_ticks = config.scale_down_grace_ticks + 1;
  }
  if (const YAML::Node c = root["chaos"]) {
    TUNECTL_RETURN_IF_ERROR(CheckKeys(c, "chaos", {"mode", "fraction", "intervalTicks"}));
    ChaosConfig config;
    TUNECTL_ASSIGN_OR_RETURN(std::string mode, Read<std::string>(c, "mode", "fail-trial"));
    auto parsed = ParseChaosMode(mode);
    if (!parsed) {
      return absl::InvalidArgumentError(
          absl::StrCat("chaos.mode must be fail-trial or kill-worker, got '", mode, "'"));
    }
    config.mode = *parsed;
    TUNECTL_ASSIGN_OR_RETURN(config.fraction, Read<double>(c, "fraction", 0.0));
    TUNECTL_ASSIGN_OR_RETURN(config.interval_ticks, Read<std::int64_t>(c, "intervalTicks", 1));
    scenario.world.chaos = config;
  }
  TUNECTL_ASSIGN_OR_RETURN(scenario.settle_ticks,
                           Read<std::int64_t>(root, "settleTicks", scenario.settle_ticks));

  for (const auto& entry : root["experiments"]) {
    TUNECTL_RETURN_IF_ERROR(CheckKeys(entry, "experiments[]", {"file", "inline"}));
    absl::StatusOr<ExperimentSpec> spec;
    if (entry["file"]) {
      const std::filesystem::path path = base_dir / entry["file"].as<std::string>();
      TUNECTL_ASSIGN_OR_RETURN(std::string body, ReadFile(path));
      spec = ParseExperiment(body, context);
      if (!spec.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat(path.string(), ": ", spec.status().message()));
      }
    } else if (entry["inline"]) {
      spec = ExperimentFromNode(entry["inline"], context);
      if (!spec.ok()) return spec.status();
    } else {
      return absl::InvalidArgumentError("experiments[] needs 'file' or 'inline'");
    }
    scenario.experiments.push_back(*std::move(spec));
  }
  return scenario;
}

absl::StatusOr<Scenario> LoadScenario(const std::filesystem::path& path,
                                      const ValidationContext& context) {
  TUNECTL_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseScenario(text, path.parent_path(), context);
}

absl::StatusOr<ScenarioRun> RunScenario(const Scenario& scenario,
                                        const suggest::AlgorithmRegistry& registry) {
  ScenarioRun run;
  run.store = controller::ResourceStore::InMemory();
  run.metrics = std::make_unique<metrics::MemoryObservationStore>();
  for (const auto& spec : scenario.experiments) {
    TUNECTL_RETURN_IF_ERROR(controller::SubmitExperiment(*run.store, spec));
  }
  TUNECTL_ASSIGN_OR_RETURN(run.world, World::Create(scenario.world, run.store.get(),
                                                    run.metrics.get(), &registry));
  TUNECTL_RETURN_IF_ERROR(run.world->Reconcile().status());
  std::int64_t settle = -1;
  while (run.world->tick() < scenario.max_ticks) {
    if (settle < 0 && run.world->Finished()) settle = scenario.settle_ticks;
    if (settle == 0) break;
    if (settle > 0) --settle;
    TUNECTL_RETURN_IF_ERROR(run.world->Tick());
  }
  run.finished = run.world->Finished();
  return run;
}

}  // namespace tunectl::sim
