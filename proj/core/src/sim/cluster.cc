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

#include "tunectl/sim/cluster.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "tunectl/common/rng.h"

namespace tunectl::sim {
namespace {

using controller::JobPhase;

constexpr double kEpsilon = 1e-9;

constexpr std::pair<JobPhase, std::string_view> kPhaseNames[] = {
    {JobPhase::kUnknown, "Unknown"},
    {JobPhase::kPending, "Pending"},
    {JobPhase::kRunning, "Running"},
    {JobPhase::kSucceeded, "Succeeded"},
    {JobPhase::kTemporaryFailure, "TemporaryFailure"},
    {JobPhase::kPermanentFailure, "PermanentFailure"},
};

std::string PhaseName(JobPhase phase) {
  for (const auto& [value, name] : kPhaseNames) {
    if (value == phase) return std::string(name);
  }
  return "Unknown";
}

std::optional<JobPhase> ParsePhase(std::string_view text) {
  for (const auto& [value, name] : kPhaseNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

nlohmann::json WorkloadToJson(const Workload& w) {
  nlohmann::json units = nlohmann::json::array();
  for (const auto& unit : w.units) {
    units.push_back(unit.node ? nlohmann::json(*unit.node) : nlohmann::json(nullptr));
  }
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto& a : w.assignments) assignments.push_back({a.name, a.value});
  nlohmann::json out = {
      {"name", w.name},
      {"namespace", w.namespace_name},
      {"kind", w.kind == WorkloadKind::kTrial ? "trial" : "service"},
      {"cpuPerWorker", w.cpu_per_worker},
      {"units", units},
      {"phase", PhaseName(w.phase)},
      {"attempt", w.attempt},
      {"reason", w.reason},
      {"assignments", assignments},
      {"resourceFraction", w.resource_fraction},
      {"collector", std::string(ToString(w.collector))},
      {"watched", w.watched_metrics},
      {"progress", w.progress_ticks},
      {"total", w.total_ticks},
  };
  if (w.objective) {
    out["objective"] = {{"function", w.objective->function_name},
                        {"durationTicks", w.objective->duration_ticks},
                        {"noiseStddev", w.objective->noise_stddev},
                        {"rngSeedOffset", w.objective->rng_seed_offset}};
  }
  return out;
}

absl::StatusOr<Workload> WorkloadFromJson(const nlohmann::json& j) {
  try {
    Workload w;
    w.name = j.at("name").get<std::string>();
    w.namespace_name = j.at("namespace").get<std::string>();
    w.kind = j.at("kind").get<std::string>() == "service" ? WorkloadKind::kService
                                                          : WorkloadKind::kTrial;
    w.cpu_per_worker = j.at("cpuPerWorker").get<double>();
    int index = 0;
    for (const auto& unit : j.at("units")) {
      WorkerUnit u{index++, std::nullopt};
      if (!unit.is_null()) u.node = unit.get<int>();
      w.units.push_back(u);
    }
    auto phase = ParsePhase(j.at("phase").get<std::string>());
    if (!phase) return absl::InvalidArgumentError("bad workload phase");
    w.phase = *phase;
    w.attempt = j.at("attempt").get<int>();
    w.reason = j.at("reason").get<std::string>();
    for (const auto& a : j.at("assignments")) {
      w.assignments.push_back({a.at(0).get<std::string>(), a.at(1).get<std::string>()});
    }
    w.resource_fraction = j.at("resourceFraction").get<double>();
    auto collector = ParseMetricCollectorKind(j.at("collector").get<std::string>());
    if (!collector) return absl::InvalidArgumentError("bad collector kind");
    w.collector = *collector;
    w.watched_metrics = j.at("watched").get<std::vector<std::string>>();
    w.progress_ticks = j.at("progress").get<std::int64_t>();
    w.total_ticks = j.at("total").get<std::int64_t>();
    if (j.contains("objective")) {
      const auto& o = j["objective"];
      w.objective = SimObjectiveDescriptor{o.at("function").get<std::string>(),
                                           o.at("durationTicks").get<std::int64_t>(),
                                           o.at("noiseStddev").get<double>(),
                                           o.at("rngSeedOffset").get<std::int64_t>()};
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed workload: ", e.what()));
  }
}

}  // namespace

std::string_view ToString(ChaosMode mode) {
  return mode == ChaosMode::kFailTrial ? "fail-trial" : "kill-worker";
}

std::optional<ChaosMode> ParseChaosMode(std::string_view text) {
  if (text == "fail-trial") return ChaosMode::kFailTrial;
  if (text == "kill-worker") return ChaosMode::kKillWorker;
  return std::nullopt;
}

bool Workload::Placed() const {
  return std::all_of(units.begin(), units.end(), [](const WorkerUnit& u) { return u.node; });
}

void EventLog::Append(std::int64_t tick, std::string kind, nlohmann::json payload) {
  entries_.push_back({{"tick", tick}, {"kind", std::move(kind)}, {"payload", std::move(payload)}});
}

std::string EventLog::ToJsonl() const {
  std::string out;
  for (const auto& entry : entries_) absl::StrAppend(&out, entry.dump(), "\n");
  return out;
}

absl::StatusOr<Cluster> Cluster::Create(const ClusterConfig& config) {
  Cluster cluster;
  cluster.config_ = config;
  for (const auto& group : config.nodes) {
    if (group.count < 0 || group.cpu <= 0.0) {
      return absl::InvalidArgumentError("node groups need count >= 0 and cpu > 0");
    }
    for (int i = 0; i < group.count; ++i) {
      cluster.nodes_.push_back({cluster.next_node_id_++, group.cpu, 0.0, 0});
    }
  }
  for (const auto& quota : config.namespaces) {
    if (quota.cpu_limit && *quota.cpu_limit < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("namespace ", quota.name, " has a negative cpu limit"));
    }
  }
  return cluster;
}

absl::Status Cluster::Add(Workload workload) {
  if (!config_.namespaces.empty() &&
      std::none_of(config_.namespaces.begin(), config_.namespaces.end(),
                   [&](const NamespaceQuota& q) { return q.name == workload.namespace_name; })) {
    return absl::InvalidArgumentError(
        absl::StrCat("namespace ", workload.namespace_name, " does not exist"));
  }
  if (workloads_.count(workload.name) > 0) {
    return absl::AlreadyExistsError(absl::StrCat("workload ", workload.name, " exists"));
  }
  std::string name = workload.name;
  workloads_.emplace(std::move(name), std::move(workload));
  return absl::OkStatus();
}

const Workload* Cluster::Find(std::string_view name) const {
  auto it = workloads_.find(name);
  return it == workloads_.end() ? nullptr : &it->second;
}

Workload* Cluster::Mutable(std::string_view name) {
  auto it = workloads_.find(name);
  return it == workloads_.end() ? nullptr : &it->second;
}

void Cluster::Remove(std::string_view name) {
  auto it = workloads_.find(name);
  if (it == workloads_.end()) return;
  Release(it->second);
  workloads_.erase(it);
}

Node* Cluster::FindNode(int id) {
  for (auto& node : nodes_) {
    if (node.id == id) return &node;
  }
  return nullptr;
}

void Cluster::Release(Workload& workload) {
  for (auto& unit : workload.units) {
    if (!unit.node) continue;
    if (Node* node = FindNode(*unit.node)) {
      node->allocated -= workload.cpu_per_worker;
      if (node->allocated < kEpsilon) {
        node->allocated = 0.0;
        node->idle_since = tick_;
      }
    }
    usage_[workload.namespace_name] -= workload.cpu_per_worker;
    unit.node.reset();
  }
}

void Cluster::Place(Workload& workload, WorkerUnit& unit, Node& node) {
  node.allocated += workload.cpu_per_worker;
  usage_[workload.namespace_name] += workload.cpu_per_worker;
  unit.node = node.id;
}

double Cluster::NamespaceUsage(std::string_view ns) const {
  auto it = usage_.find(ns);
  return it == usage_.end() ? 0.0 : std::max(0.0, it->second);
}

std::optional<double> Cluster::NamespaceLimit(std::string_view ns) const {
  for (const auto& quota : config_.namespaces) {
    if (quota.name == ns) return quota.cpu_limit;
  }
  return std::nullopt;
}

bool Cluster::Admits(std::string_view ns, double cpu) const {
  auto limit = NamespaceLimit(ns);
  return !limit || NamespaceUsage(ns) + cpu <= *limit + kEpsilon;
}

Node* Cluster::FirstFit(double cpu) {
  for (auto& node : nodes_) {
    if (node.allocated + cpu <= node.capacity + kEpsilon) return &node;
  }
  return nullptr;
}

void Cluster::MaybeStart(Workload& workload, EventLog& log) {
  if (workload.phase != JobPhase::kPending || !workload.Placed()) return;
  workload.phase = JobPhase::kRunning;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& unit : workload.units) nodes.push_back(*unit.node);
  log.Append(tick_, workload.kind == WorkloadKind::kTrial ? "trial_started" : "service_started",
             {{"name", workload.name}, {"namespace", workload.namespace_name},
              {"attempt", workload.attempt}, {"nodes", nodes}});
}

double Cluster::Schedule(EventLog& log) {
  std::vector<Workload*> pending;
  for (auto& [name, workload] : workloads_) {
    if (workload.phase == JobPhase::kPending && !workload.Placed()) pending.push_back(&workload);
  }
  // Largest request first; map order already breaks ties by name.
  std::stable_sort(pending.begin(), pending.end(), [](const Workload* a, const Workload* b) {
    return a->cpu_per_worker > b->cpu_per_worker;
  });

  double blocked = 0.0;
  if (config_.gang_scheduling) {
    for (Workload* workload : pending) {
      std::vector<WorkerUnit*> missing;
      for (auto& unit : workload->units) {
        if (!unit.node) missing.push_back(&unit);
      }
      const double need = workload->cpu_per_worker * static_cast<double>(missing.size());
      if (!Admits(workload->namespace_name, need)) continue;
      std::vector<double> trial_alloc;
      for (const auto& node : nodes_) trial_alloc.push_back(node.allocated);
      std::vector<std::size_t> chosen;
      for (std::size_t u = 0; u < missing.size(); ++u) {
        for (std::size_t n = 0; n < nodes_.size(); ++n) {
          if (trial_alloc[n] + workload->cpu_per_worker <= nodes_[n].capacity + kEpsilon) {
            trial_alloc[n] += workload->cpu_per_worker;
            chosen.push_back(n);
            break;
          }
        }
      }
      if (chosen.size() < missing.size()) {
        blocked += need;
        continue;
      }
      for (std::size_t u = 0; u < missing.size(); ++u) {
        Place(*workload, *missing[u], nodes_[chosen[u]]);
      }
      MaybeStart(*workload, log);
    }
    return blocked;
  }

  for (Workload* workload : pending) {
    for (auto& unit : workload->units) {
      if (unit.node) continue;
      if (!Admits(workload->namespace_name, workload->cpu_per_worker)) continue;
      Node* node = FirstFit(workload->cpu_per_worker);
      if (node == nullptr) {
        blocked += workload->cpu_per_worker;
        continue;
      }
      Place(*workload, unit, *node);
    }
    MaybeStart(*workload, log);
  }
  return blocked;
}

void Cluster::Autoscale(const AutoscalerConfig& config, double blocked_cpu, EventLog& log) {
  const int count = static_cast<int>(nodes_.size());
  if (blocked_cpu > kEpsilon) {
    if (count >= config.max_nodes) return;
    const int wanted = static_cast<int>(std::ceil(blocked_cpu / config.node_cpu - kEpsilon));
    const int add = std::min(config.max_nodes - count, std::max(1, wanted));
    for (int i = 0; i < add; ++i) {
      nodes_.push_back({next_node_id_++, config.node_cpu, 0.0, tick_});
      log.Append(tick_, "node_added", {{"node", nodes_.back().id}, {"cpu", config.node_cpu}});
    }
    return;
  }
  int remaining = count;
  for (auto it = nodes_.end(); it != nodes_.begin() && remaining > config.min_nodes;) {
    --it;
    if (it->allocated < kEpsilon && tick_ - it->idle_since >= config.scale_down_grace_ticks) {
      log.Append(tick_, "node_removed", {{"node", it->id}});
      it = nodes_.erase(it);
      --remaining;
    }
  }
}

void Cluster::Strike(const ChaosConfig& config, std::uint64_t seed, EventLog& log) {
  if (config.fraction <= 0.0 || config.interval_ticks <= 0 || tick_ <= 0 ||
      tick_ % config.interval_ticks != 0) {
    return;
  }
  std::vector<Workload*> running;
  for (auto& [name, workload] : workloads_) {
    if (workload.kind == WorkloadKind::kTrial && workload.phase == JobPhase::kRunning) {
      running.push_back(&workload);
    }
  }
  if (running.empty()) return;
  const auto hits = std::min(
      running.size(),
      static_cast<std::size_t>(std::ceil(config.fraction * static_cast<double>(running.size()) -
                                         kEpsilon)));
  Rng rng(DeriveSeed(seed, "chaos", static_cast<std::uint64_t>(tick_)));
  for (std::size_t i = 0; i < hits; ++i) {
    std::swap(running[i], running[i + rng.Index(running.size() - i)]);
  }
  std::sort(running.begin(), running.begin() + static_cast<std::ptrdiff_t>(hits),
            [](const Workload* a, const Workload* b) { return a->name < b->name; });
  for (std::size_t i = 0; i < hits; ++i) {
    Workload& victim = *running[i];
    if (config.mode == ChaosMode::kFailTrial) {
      victim.phase = JobPhase::kPermanentFailure;
      victim.reason = "chaos: trial failed";
    } else {
      const std::size_t worker = rng.Index(victim.units.size());
      victim.phase = JobPhase::kTemporaryFailure;
      victim.reason = absl::StrCat("chaos: worker ", worker, " killed");
    }
    Release(victim);
    log.Append(tick_, "chaos",
               {{"name", victim.name}, {"mode", std::string(ToString(config.mode))},
                {"reason", victim.reason}, {"progress", victim.progress_ticks}});
  }
}

std::vector<std::string> Cluster::CheckInvariants() const {
  std::vector<std::string> problems;
  for (const auto& node : nodes_) {
    if (node.allocated > node.capacity + kEpsilon) {
      problems.push_back(absl::StrCat("node ", node.id, " allocated ", node.allocated, " of ",
                                      node.capacity));
    }
  }
  if (config_.gang_scheduling) {
    for (const auto& [name, workload] : workloads_) {
      const auto placed = std::count_if(workload.units.begin(), workload.units.end(),
                                        [](const WorkerUnit& u) { return u.node.has_value(); });
      if (placed > 0 && placed < static_cast<std::ptrdiff_t>(workload.units.size())) {
        problems.push_back(absl::StrCat("job ", name, " is partially placed"));
      }
    }
  }
  for (const auto& quota : config_.namespaces) {
    if (quota.cpu_limit && NamespaceUsage(quota.name) > *quota.cpu_limit + kEpsilon) {
      problems.push_back(absl::StrCat("namespace ", quota.name, " uses ",
                                      NamespaceUsage(quota.name), " of ", *quota.cpu_limit));
    }
  }
  return problems;
}

nlohmann::json Cluster::ToJson() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& node : nodes_) {
    nodes.push_back({{"id", node.id},
                     {"capacity", node.capacity},
                     {"allocated", node.allocated},
                     {"idleSince", node.idle_since}});
  }
  nlohmann::json namespaces = nlohmann::json::array();
  for (const auto& quota : config_.namespaces) {
    namespaces.push_back({{"name", quota.name},
                          {"cpuLimit", quota.cpu_limit ? nlohmann::json(*quota.cpu_limit)
                                                       : nlohmann::json(nullptr)}});
  }
  nlohmann::json workloads = nlohmann::json::array();
  for (const auto& [name, workload] : workloads_) workloads.push_back(WorkloadToJson(workload));
  return {{"tick", tick_},         {"gang", config_.gang_scheduling}, {"nextNodeId", next_node_id_},
          {"nodes", nodes},        {"namespaces", namespaces},        {"workloads", workloads}};
}

absl::StatusOr<Cluster> Cluster::FromJson(const nlohmann::json& json) {
  Cluster cluster;
  try {
    cluster.tick_ = json.at("tick").get<std::int64_t>();
    cluster.config_.gang_scheduling = json.at("gang").get<bool>();
    cluster.next_node_id_ = json.at("nextNodeId").get<int>();
    for (const auto& n : json.at("nodes")) {
      cluster.nodes_.push_back({n.at("id").get<int>(), n.at("capacity").get<double>(),
                                n.at("allocated").get<double>(),
                                n.at("idleSince").get<std::int64_t>()});
    }
    for (const auto& q : json.at("namespaces")) {
      NamespaceQuota quota{q.at("name").get<std::string>(), std::nullopt};
      if (!q.at("cpuLimit").is_null()) quota.cpu_limit = q["cpuLimit"].get<double>();
      cluster.config_.namespaces.push_back(std::move(quota));
    }
    for (const auto& w : json.at("workloads")) {
      auto workload = WorkloadFromJson(w);
      if (!workload.ok()) return workload.status();
      for (const auto& unit : workload->units) {
        if (unit.node) cluster.usage_[workload->namespace_name] += workload->cpu_per_worker;
      }
      std::string name = workload->name;
      cluster.workloads_.emplace(std::move(name), *std::move(workload));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed cluster snapshot: ", e.what()));
  }
  return cluster;
}

}  // namespace tunectl::sim
