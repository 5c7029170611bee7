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

#ifndef TUNECTL_SIM_WORLD_H_
#define TUNECTL_SIM_WORLD_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"
#include "tunectl/controller/control_loop.h"
#include "tunectl/controller/resource_store.h"
#include "tunectl/metrics/metric_point.h"
#include "tunectl/sim/cluster.h"
#include "tunectl/sim/sim_backend.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::sim {

struct WorldConfig {
  ClusterConfig cluster;
  std::optional<AutoscalerConfig> autoscaler;
  std::optional<ChaosConfig> chaos;
  double algorithm_service_cpu = 0.5;
  std::uint64_t seed = 0;
};

struct ExperimentSample {
  std::string phase;
  int succeeded = 0;
  int failed = 0;
  int running = 0;
  std::optional<double> best;
};

// Cluster and experiment state at the end of one tick.
struct TickStats {
  std::int64_t tick = 0;
  int nodes = 0;
  double capacity = 0.0;
  double allocated = 0.0;
  int pending_workers = 0;
  // Running trial jobs per namespace.
  std::map<std::string, int> running_trials;
  // Keyed by "namespace/name".
  std::map<std::string, ExperimentSample> experiments;
};

nlohmann::json ToJson(const TickStats& stats);
absl::StatusOr<TickStats> TickStatsFromJson(const nlohmann::json& json);

// The simulated cluster together with the control loop. A tick runs chaos,
// trial progress, scheduling and autoscaling, then reconciles to a fixed
// point.
class World {
 public:
  static absl::StatusOr<std::unique_ptr<World>> Create(const WorldConfig& config,
                                                       controller::ResourceStore* store,
                                                       metrics::ObservationStore* metrics,
                                                       const suggest::AlgorithmRegistry* registry);

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  // Starts the next tick and runs everything before the controllers.
  absl::Status AdvancePhysics();
  // Reconciles the current tick. Returns false if `stop` fired; calling it
  // again resumes the same tick.
  absl::StatusOr<bool> Reconcile(const std::function<bool()>& stop = {});
  // AdvancePhysics followed by an uninterrupted Reconcile.
  absl::Status Tick();

  // Swaps in a reopened resource store, as after a controller restart.
  void AttachStore(controller::ResourceStore* store);

  bool Finished() const { return loop_->Finished(); }
  std::int64_t tick() const { return cluster_.tick(); }
  const Cluster& cluster() const { return cluster_; }
  const EventLog& events() const { return events_; }
  const std::vector<TickStats>& stats() const { return stats_; }
  // Capacity or quota breaches observed after scheduling.
  const std::vector<std::string>& violations() const { return violations_; }
  controller::ResourceStore* store() const { return store_; }

  // Everything needed to continue the run in another process, except the
  // resource and metrics stores.
  nlohmann::json Snapshot() const;
  static absl::StatusOr<std::unique_ptr<World>> Restore(const nlohmann::json& snapshot,
                                                        controller::ResourceStore* store,
                                                        metrics::ObservationStore* metrics,
                                                        const suggest::AlgorithmRegistry* registry);

 private:
  World(const WorldConfig& config, Cluster cluster, controller::ResourceStore* store,
        metrics::ObservationStore* metrics, const suggest::AlgorithmRegistry* registry);

  TickStats Sample() const;

  WorldConfig config_;
  Cluster cluster_;
  EventLog events_;
  SimBackend backend_;
  controller::ResourceStore* store_;
  metrics::ObservationStore* metrics_;
  const suggest::AlgorithmRegistry* registry_;
  std::unique_ptr<controller::ControlLoop> loop_;
  std::vector<TickStats> stats_;
  std::vector<std::string> violations_;
};

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_WORLD_H_
