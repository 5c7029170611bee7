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

#ifndef TUNECTL_SIM_CLUSTER_H_
#define TUNECTL_SIM_CLUSTER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"
#include "tunectl/controller/trial_backend.h"
#include "tunectl/model/experiment.h"

namespace tunectl::sim {

struct NodeGroup {
  int count = 0;
  double cpu = 0.0;
};

struct NamespaceQuota {
  std::string name;
  // Unlimited when absent.
  std::optional<double> cpu_limit;
};

struct ClusterConfig {
  std::vector<NodeGroup> nodes;
  // When empty every namespace is admitted without a limit.
  std::vector<NamespaceQuota> namespaces;
  // Place all workers of a job in one step or none of them.
  bool gang_scheduling = false;
};

struct AutoscalerConfig {
  int min_nodes = 1;
  int max_nodes = 1;
  double node_cpu = 1.0;
  std::int64_t scale_down_grace_ticks = 10;
};

enum class ChaosMode { kFailTrial, kKillWorker };

std::string_view ToString(ChaosMode mode);
std::optional<ChaosMode> ParseChaosMode(std::string_view text);

struct ChaosConfig {
  ChaosMode mode = ChaosMode::kFailTrial;
  // Share of running trials hit per strike, rounded up.
  double fraction = 0.0;
  std::int64_t interval_ticks = 1;
};

struct Node {
  int id = 0;
  double capacity = 0.0;
  double allocated = 0.0;
  // Tick at which the node last became empty.
  std::int64_t idle_since = 0;
};

enum class WorkloadKind { kTrial, kService };

struct WorkerUnit {
  int index = 0;
  std::optional<int> node;
};

// A trial job or an algorithm service occupying cluster capacity.
struct Workload {
  std::string name;
  std::string namespace_name;
  WorkloadKind kind = WorkloadKind::kTrial;
  double cpu_per_worker = 0.0;
  std::vector<WorkerUnit> units;
  // Services only use kPending and kRunning.
  controller::JobPhase phase = controller::JobPhase::kPending;
  int attempt = 0;
  std::string reason;

  // Trial payload. Progress survives worker loss.
  std::optional<SimObjectiveDescriptor> objective;
  AssignmentSet assignments;
  double resource_fraction = 1.0;
  MetricCollectorKind collector = MetricCollectorKind::kPull;
  std::vector<std::string> watched_metrics;
  std::int64_t progress_ticks = 0;
  std::int64_t total_ticks = 1;

  bool Placed() const;
};

// Structured simulation events, serialized as {"tick", "kind", "payload"}.
class EventLog {
 public:
  void Append(std::int64_t tick, std::string kind, nlohmann::json payload);
  const std::vector<nlohmann::json>& entries() const { return entries_; }
  // One JSON object per line.
  std::string ToJsonl() const;

 private:
  std::vector<nlohmann::json> entries_;
};

// Nodes, namespace quotas and the workloads placed on them. All iteration
// is in name or id order so every run is reproducible.
class Cluster {
 public:
  static absl::StatusOr<Cluster> Create(const ClusterConfig& config);

  // Sets the tick used for idle bookkeeping of subsequent releases.
  void set_tick(std::int64_t tick) { tick_ = tick; }
  std::int64_t tick() const { return tick_; }

  // Adds a pending workload. InvalidArgument for an unknown namespace.
  absl::Status Add(Workload workload);
  const Workload* Find(std::string_view name) const;
  Workload* Mutable(std::string_view name);
  // Frees the workload's capacity and forgets it.
  void Remove(std::string_view name);
  // Frees every placed unit of the workload.
  void Release(Workload& workload);

  // First-fit decreasing placement of pending units. Returns the CPU of units
  // that could not be placed for lack of node capacity (quota-blocked units
  // do not count).
  double Schedule(EventLog& log);

  // Grows by ceil(blocked_cpu / node_cpu) nodes up to the maximum; otherwise
  // removes the highest-id nodes idle for the grace period, down to the
  // minimum.
  void Autoscale(const AutoscalerConfig& config, double blocked_cpu, EventLog& log);

  // On every interval tick fails the chosen share of running trials.
  void Strike(const ChaosConfig& config, std::uint64_t seed, EventLog& log);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::map<std::string, Workload, std::less<>>& workloads() const { return workloads_; }
  double NamespaceUsage(std::string_view ns) const;
  std::optional<double> NamespaceLimit(std::string_view ns) const;

  // Empty when no node or namespace is over its limit and, under gang
  // scheduling, no job is partially placed.
  std::vector<std::string> CheckInvariants() const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<Cluster> FromJson(const nlohmann::json& json);

 private:
  Cluster() = default;

  Node* FindNode(int id);
  void Place(Workload& workload, WorkerUnit& unit, Node& node);
  bool Admits(std::string_view ns, double cpu) const;
  Node* FirstFit(double cpu);
  void MaybeStart(Workload& workload, EventLog& log);

  ClusterConfig config_;
  std::vector<Node> nodes_;
  int next_node_id_ = 0;
  std::map<std::string, Workload, std::less<>> workloads_;
  std::map<std::string, double, std::less<>> usage_;
  std::int64_t tick_ = 0;
};

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_CLUSTER_H_
