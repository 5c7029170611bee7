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

#include "tunectl/sim/world.h"

#include <utility>

#include "absl/strings/str_cat.h"
#include "tunectl/common/rng.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/controller/resources.h"

namespace tunectl::sim {
namespace {

using controller::JobPhase;

nlohmann::json OptionalNumber(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json ConfigToJson(const WorldConfig& config) {
  nlohmann::json out = {{"serviceCpu", config.algorithm_service_cpu}, {"seed", config.seed}};
  if (config.autoscaler) {
    out["autoscaler"] = {{"minNodes", config.autoscaler->min_nodes},
                         {"maxNodes", config.autoscaler->max_nodes},
                         {"nodeCpu", config.autoscaler->node_cpu},
                         {"graceTicks", config.autoscaler->scale_down_grace_ticks}};
  }
  if (config.chaos) {
    out["chaos"] = {{"mode", std::string(ToString(config.chaos->mode))},
                    {"fraction", config.chaos->fraction},
                    {"intervalTicks", config.chaos->interval_ticks}};
  }
  return out;
}

WorldConfig ConfigFromJson(const nlohmann::json& j) {
  WorldConfig config;
  config.algorithm_service_cpu = j.at("serviceCpu").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("autoscaler")) {
    const auto& a = j["autoscaler"];
    config.autoscaler = AutoscalerConfig{a.at("minNodes").get<int>(), a.at("maxNodes").get<int>(),
                                         a.at("nodeCpu").get<double>(),
                                         a.at("graceTicks").get<std::int64_t>()};
  }
  if (j.contains("chaos")) {
    const auto& c = j["chaos"];
    config.chaos = ChaosConfig{ParseChaosMode(c.at("mode").get<std::string>())
                                   .value_or(ChaosMode::kFailTrial),
                               c.at("fraction").get<double>(),
                               c.at("intervalTicks").get<std::int64_t>()};
  }
  return config;
}

}  // namespace

nlohmann::json ToJson(const TickStats& stats) {
  nlohmann::json experiments = nlohmann::json::object();
  for (const auto& [key, sample] : stats.experiments) {
    experiments[key] = {{"phase", sample.phase},
                        {"succeeded", sample.succeeded},
                        {"failed", sample.failed},
                        {"running", sample.running},
                        {"best", OptionalNumber(sample.best)}};
  }
  return {{"tick", stats.tick},
          {"nodes", stats.nodes},
          {"capacity", stats.capacity},
          {"allocated", stats.allocated},
          {"pendingWorkers", stats.pending_workers},
          {"runningTrials", stats.running_trials},
          {"experiments", experiments}};
}

absl::StatusOr<TickStats> TickStatsFromJson(const nlohmann::json& json) {
  try {
    TickStats stats;
    stats.tick = json.at("tick").get<std::int64_t>();
    stats.nodes = json.at("nodes").get<int>();
    stats.capacity = json.at("capacity").get<double>();
    stats.allocated = json.at("allocated").get<double>();
    stats.pending_workers = json.at("pendingWorkers").get<int>();
    stats.running_trials = json.at("runningTrials").get<std::map<std::string, int>>();
    for (const auto& [key, s] : json.at("experiments").items()) {
      ExperimentSample sample;
      sample.phase = s.at("phase").get<std::string>();
      sample.succeeded = s.at("succeeded").get<int>();
      sample.failed = s.at("failed").get<int>();
      sample.running = s.at("running").get<int>();
      if (!s.at("best").is_null()) sample.best = s["best"].get<double>();
      stats.experiments.emplace(key, std::move(sample));
    }
    return stats;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed tick stats: ", e.what()));
  }
}

World::World(const WorldConfig& config, Cluster cluster, controller::ResourceStore* store,
             metrics::ObservationStore* metrics, const suggest::AlgorithmRegistry* registry)
    : config_(config),
      cluster_(std::move(cluster)),
      backend_(&cluster_, &events_, config.algorithm_service_cpu),
      store_(store),
      metrics_(metrics),
      registry_(registry) {
  AttachStore(store);
}

absl::StatusOr<std::unique_ptr<World>> World::Create(const WorldConfig& config,
                                                     controller::ResourceStore* store,
                                                     metrics::ObservationStore* metrics,
                                                     const suggest::AlgorithmRegistry* registry) {
  if (config.autoscaler) {
    const auto& a = *config.autoscaler;
    if (a.min_nodes < 1 || a.max_nodes < a.min_nodes || a.node_cpu <= 0.0) {
      return absl::InvalidArgumentError("autoscaler needs 1 <= minNodes <= maxNodes, nodeCpu > 0");
    }
  }
  if (config.chaos && (config.chaos->fraction < 0.0 || config.chaos->fraction > 1.0 ||
                       config.chaos->interval_ticks < 1)) {
    return absl::InvalidArgumentError("chaos needs fraction in [0,1] and intervalTicks >= 1");
  }
  TUNECTL_ASSIGN_OR_RETURN(Cluster cluster, Cluster::Create(config.cluster));
  return std::unique_ptr<World>(new World(config, std::move(cluster), store, metrics, registry));
}

void World::AttachStore(controller::ResourceStore* store) {
  store_ = store;
  loop_ = std::make_unique<controller::ControlLoop>(
      store, controller::ControllerContext{registry_, metrics_, &backend_});
}

absl::Status World::AdvancePhysics() {
  cluster_.set_tick(cluster_.tick() + 1);
  if (config_.chaos) cluster_.Strike(*config_.chaos, DeriveSeed(config_.seed, "chaos"), events_);
  AdvanceTrials(cluster_, *metrics_, config_.seed, events_);
  const double blocked = cluster_.Schedule(events_);
  if (config_.autoscaler) cluster_.Autoscale(*config_.autoscaler, blocked, events_);
  for (std::string& problem : cluster_.CheckInvariants()) {
    violations_.push_back(absl::StrCat("tick ", cluster_.tick(), ": ", problem));
  }
  return absl::OkStatus();
}

absl::StatusOr<bool> World::Reconcile(const std::function<bool()>& stop) {
  TUNECTL_ASSIGN_OR_RETURN(bool done, loop_->Step(stop));
  if (!done) return false;
  stats_.push_back(Sample());
  events_.Append(cluster_.tick(), "tick", ToJson(stats_.back()));
  return true;
}

absl::Status World::Tick() {
  TUNECTL_RETURN_IF_ERROR(AdvancePhysics());
  return Reconcile().status();
}

TickStats World::Sample() const {
  TickStats stats;
  stats.tick = cluster_.tick();
  stats.nodes = static_cast<int>(cluster_.nodes().size());
  for (const auto& node : cluster_.nodes()) {
    stats.capacity += node.capacity;
    stats.allocated += node.allocated;
  }
  for (const auto& [name, workload] : cluster_.workloads()) {
    if (workload.phase == JobPhase::kPending) {
      for (const auto& unit : workload.units) stats.pending_workers += unit.node ? 0 : 1;
    }
    if (workload.kind == WorkloadKind::kTrial && workload.phase == JobPhase::kRunning) {
      ++stats.running_trials[workload.namespace_name];
    }
  }
  for (const std::string& key : store_->Keys("experiments/")) {
    auto experiment = controller::GetAs<controller::ExperimentResource>(*store_, key);
    if (!experiment) continue;
    const auto& status = experiment->first.status;
    ExperimentSample sample;
    sample.phase = std::string(controller::ToString(status.phase));
    sample.succeeded = status.trials_succeeded;
    sample.failed = status.trials_failed;
    sample.running = status.trials_running;
    if (status.current_optimal) sample.best = status.current_optimal->objective_value;
    stats.experiments.emplace(
        absl::StrCat(experiment->first.spec.namespace_name, "/", experiment->first.spec.name),
        std::move(sample));
  }
  return stats;
}

nlohmann::json World::Snapshot() const {
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& s : stats_) stats.push_back(ToJson(s));
  return {{"config", ConfigToJson(config_)},
          {"cluster", cluster_.ToJson()},
          {"stats", stats},
          {"events", events_.entries()},
          {"violations", violations_}};
}

absl::StatusOr<std::unique_ptr<World>> World::Restore(const nlohmann::json& snapshot,
                                                      controller::ResourceStore* store,
                                                      metrics::ObservationStore* metrics,
                                                      const suggest::AlgorithmRegistry* registry) {
  try {
    WorldConfig config = ConfigFromJson(snapshot.at("config"));
    TUNECTL_ASSIGN_OR_RETURN(Cluster cluster, Cluster::FromJson(snapshot.at("cluster")));
    auto world = std::unique_ptr<World>(
        new World(config, std::move(cluster), store, metrics, registry));
    for (const auto& s : snapshot.at("stats")) {
      TUNECTL_ASSIGN_OR_RETURN(TickStats stats, TickStatsFromJson(s));
      world->stats_.push_back(std::move(stats));
    }
    for (const auto& e : snapshot.at("events")) {
      world->events_.Append(e.at("tick").get<std::int64_t>(), e.at("kind").get<std::string>(),
                            e.at("payload"));
    }
    world->violations_ = snapshot.at("violations").get<std::vector<std::string>>();
    return world;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed world snapshot: ", e.what()));
  }
}

}  // namespace tunectl::sim
