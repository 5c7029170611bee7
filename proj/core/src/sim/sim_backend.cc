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

#include "tunectl/sim/sim_backend.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "tunectl/common/rng.h"
#include "tunectl/metrics/metric_parser.h"
#include "tunectl/sim/objectives.h"

namespace tunectl::sim {

using controller::JobPhase;

std::string ServiceName(std::string_view ns, std::string_view experiment) {
  return absl::StrCat("algorithm:", std::string(ns), "/", std::string(experiment));
}

absl::Status SimBackend::Submit(const controller::JobRequest& request) {
  const TrialRunSpec& spec = request.run_spec;
  if (const Workload* existing = cluster_->Find(spec.trial_name)) {
    if (existing->namespace_name != spec.namespace_name) {
      return absl::AlreadyExistsError(absl::StrCat("job ", spec.trial_name,
                                                   " already runs in namespace ",
                                                   existing->namespace_name));
    }
    return absl::OkStatus();
  }
  Workload workload;
  workload.name = spec.trial_name;
  workload.namespace_name = spec.namespace_name;
  workload.kind = WorkloadKind::kTrial;
  workload.cpu_per_worker = request.cpu_per_worker;
  for (int i = 0; i < request.worker_count; ++i) workload.units.push_back({i, std::nullopt});
  workload.assignments = spec.parameter_assignments;
  workload.resource_fraction = spec.resource_fraction;
  workload.collector = request.collector;
  workload.watched_metrics = request.watched_metrics;
  if (const auto* descriptor = std::get_if<SimObjectiveDescriptor>(&spec.resolved_payload)) {
    workload.objective = *descriptor;
    workload.total_ticks = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(static_cast<double>(descriptor->duration_ticks) *
                                               spec.resource_fraction - 1e-9)));
  } else {
    workload.units.clear();
    workload.phase = JobPhase::kPermanentFailure;
    workload.reason = "the simulated cluster cannot run commands";
  }
  log_->Append(cluster_->tick(), "trial_submitted",
               {{"name", workload.name}, {"namespace", workload.namespace_name},
                {"workers", request.worker_count}, {"cpuPerWorker", request.cpu_per_worker}});
  return cluster_->Add(std::move(workload));
}

controller::JobStatus SimBackend::Status(std::string_view trial_name) const {
  const Workload* workload = cluster_->Find(trial_name);
  if (workload == nullptr || workload->kind != WorkloadKind::kTrial) return {};
  return {workload->phase, workload->attempt, workload->reason};
}

absl::Status SimBackend::Restart(std::string_view trial_name, int attempt) {
  Workload* workload = cluster_->Mutable(trial_name);
  if (workload == nullptr) {
    return absl::NotFoundError(absl::StrCat("no job ", std::string(trial_name)));
  }
  if (attempt <= workload->attempt) return absl::OkStatus();
  if (workload->phase != JobPhase::kTemporaryFailure) {
    return absl::FailedPreconditionError(
        absl::StrCat("job ", std::string(trial_name), " is not temporarily failed"));
  }
  cluster_->Release(*workload);
  workload->attempt = attempt;
  workload->phase = JobPhase::kPending;
  workload->reason.clear();
  log_->Append(cluster_->tick(), "trial_restarted",
               {{"name", workload->name}, {"attempt", attempt},
                {"progress", workload->progress_ticks}});
  return absl::OkStatus();
}

absl::Status SimBackend::EnsureAlgorithmService(std::string_view ns, std::string_view experiment) {
  const std::string name = ServiceName(ns, experiment);
  if (cluster_->Find(name) != nullptr) return absl::OkStatus();
  Workload service;
  service.name = name;
  service.namespace_name = std::string(ns);
  service.kind = WorkloadKind::kService;
  service.cpu_per_worker = service_cpu_;
  service.units.push_back({0, std::nullopt});
  log_->Append(cluster_->tick(), "service_requested", {{"name", name}});
  return cluster_->Add(std::move(service));
}

bool SimBackend::AlgorithmServiceReady(std::string_view ns, std::string_view experiment) const {
  const Workload* service = cluster_->Find(ServiceName(ns, experiment));
  return service != nullptr && service->phase == JobPhase::kRunning;
}

void SimBackend::ReleaseAlgorithmService(std::string_view ns, std::string_view experiment) {
  const std::string name = ServiceName(ns, experiment);
  if (cluster_->Find(name) == nullptr) return;
  cluster_->Remove(name);
  log_->Append(cluster_->tick(), "service_released", {{"name", name}});
}

void AdvanceTrials(Cluster& cluster, metrics::ObservationStore& store, std::uint64_t seed,
                   EventLog& log) {
  const std::int64_t tick = cluster.tick();
  std::vector<std::string> running;
  for (const auto& [name, workload] : cluster.workloads()) {
    if (workload.kind == WorkloadKind::kTrial && workload.phase == JobPhase::kRunning &&
        workload.objective) {
      running.push_back(name);
    }
  }
  for (const std::string& name : running) {
    Workload& trial = *cluster.Mutable(name);
    trial.progress_ticks = std::min(trial.progress_ticks + 1, trial.total_ticks);
    const double progress = trial.resource_fraction * static_cast<double>(trial.progress_ticks) /
                            static_cast<double>(trial.total_ticks);
    std::vector<metrics::MetricPoint> points;
    std::string lines;
    for (const std::string& metric : trial.watched_metrics) {
      const std::uint64_t noise_seed =
          DeriveSeed(seed, static_cast<std::uint64_t>(trial.objective->rng_seed_offset), name,
                     metric, static_cast<std::uint64_t>(trial.progress_ticks));
      auto value = EvalSimObjective(*trial.objective, trial.assignments, progress, noise_seed);
      if (!value.ok()) continue;
      points.push_back({name, metric, tick, *value});
      absl::StrAppend(&lines, metrics::FormatMetricLine(tick, metric, *value), "\n");
    }
    if (trial.collector == MetricCollectorKind::kPull) {
      points = metrics::ParseMetricLines(lines, name, trial.watched_metrics).points;
    }
    if (!points.empty()) {
      if (absl::Status status = store.Register(points); !status.ok()) {
        log.Append(tick, "metrics_rejected", {{"name", name}, {"error", status.ToString()}});
      }
    }
    if (trial.progress_ticks >= trial.total_ticks) {
      trial.phase = JobPhase::kSucceeded;
      cluster.Release(trial);
      log.Append(tick, "trial_finished", {{"name", name}, {"attempt", trial.attempt}});
    }
  }
}

}  // namespace tunectl::sim
