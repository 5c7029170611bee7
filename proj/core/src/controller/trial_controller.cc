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

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "tunectl/controller/controllers.h"
#include "tunectl/metrics/best_objective.h"

namespace tunectl::controller {
namespace {

constexpr std::int64_t kMaxSubmitBackoff = 64;

JobRequest MakeJobRequest(const ExperimentSpec& experiment, const TrialResource& trial) {
  JobRequest request;
  request.run_spec = trial.spec.run_spec;
  request.worker_count = trial.spec.worker_count;
  request.cpu_per_worker = trial.spec.cpu_per_worker;
  request.collector = experiment.metric_collector_kind;
  request.watched_metrics.push_back(experiment.objective.objective_metric_name);
  for (const auto& name : experiment.objective.additional_metric_names) {
    request.watched_metrics.push_back(name);
  }
  return request;
}

void Finish(TrialStatus& status, TrialPhase phase, std::string reason, std::int64_t now) {
  status.phase = phase;
  status.reason = std::move(reason);
  status.finish_time = now;
}

}  // namespace

absl::StatusOr<std::vector<Mutation>> ReconcileTrial(const ResourceStore& store,
                                                     std::string_view key,
                                                     const ControllerContext& context) {
  auto loaded = GetAs<TrialResource>(store, key);
  if (!loaded) return absl::NotFoundError(absl::StrCat("no trial ", std::string(key)));
  const auto& [trial, generation] = *loaded;
  if (IsTerminal(trial.status.phase)) return std::vector<Mutation>{};

  TrialBackend& backend = *context.backend;
  const std::string& name = trial.spec.run_spec.trial_name;
  TrialStatus status = trial.status;
  const std::int64_t now = backend.Now();

  if (!trial.spec.render_error.empty()) {
    Finish(status, TrialPhase::kFailed, absl::StrCat("invalid payload: ", trial.spec.render_error),
           now);
  } else {
    JobStatus job = backend.Status(name);
    if (job.phase == JobPhase::kUnknown) {
      if (now < status.next_submit_time) return std::vector<Mutation>{};
      auto experiment = GetAs<ExperimentResource>(
          store, ExperimentKey(trial.spec.run_spec.namespace_name, trial.spec.experiment_name));
      if (!experiment) return absl::NotFoundError(absl::StrCat("trial ", name, " has no experiment"));
      if (absl::Status submitted = backend.Submit(MakeJobRequest(experiment->first.spec, trial));
          !submitted.ok()) {
        ++status.submit_failures;
        status.next_submit_time =
            now + std::min<std::int64_t>(std::int64_t{1} << std::min(status.submit_failures, 6),
                                         kMaxSubmitBackoff);
        status.phase = TrialPhase::kPending;
        status.reason = absl::StrCat("submit failed: ", submitted.message());
        job.phase = JobPhase::kUnknown;
      } else {
        status.reason.clear();
        job = backend.Status(name);
      }
    }
    status.restart_count = std::max(status.restart_count, job.attempt);

    switch (job.phase) {
      case JobPhase::kUnknown:
        break;
      case JobPhase::kPending:
        status.phase = TrialPhase::kPending;
        break;
      case JobPhase::kRunning:
        status.phase = TrialPhase::kRunning;
        status.reason.clear();
        break;
      case JobPhase::kSucceeded: {
        auto experiment = GetAs<ExperimentResource>(
            store, ExperimentKey(trial.spec.run_spec.namespace_name, trial.spec.experiment_name));
        if (!experiment) return absl::NotFoundError(absl::StrCat("trial ", name, " has no experiment"));
        const ObjectiveSpec& objective = experiment->first.spec.objective;
        auto points = context.metrics->Get(name, {});
        if (!points.ok()) return points.status();
        status.observation = metrics::BestObjective(*points, objective);
        for (const auto& metric : objective.additional_metric_names) {
          if (auto value = metrics::LatestValue(*points, metric)) {
            status.additional_metrics[metric] = *value;
          }
        }
        if (status.observation) {
          Finish(status, TrialPhase::kSucceeded, "", now);
        } else {
          Finish(status, TrialPhase::kFailed, "metrics-unavailable", now);
        }
        break;
      }
      case JobPhase::kTemporaryFailure:
        if (trial.spec.restart_policy == RestartPolicy::kOnTemporaryFailure) {
          if (absl::Status restarted = backend.Restart(name, status.restart_count + 1);
              !restarted.ok()) {
            return restarted;
          }
          ++status.restart_count;
          status.phase = TrialPhase::kPending;
          status.reason = absl::StrCat("restarted after temporary failure: ", job.reason);
        } else {
          Finish(status, TrialPhase::kFailed, absl::StrCat("temporary failure: ", job.reason), now);
        }
        break;
      case JobPhase::kPermanentFailure:
        Finish(status, TrialPhase::kFailed, job.reason.empty() ? "job failed" : job.reason, now);
        break;
    }
  }

  if (status == trial.status) return std::vector<Mutation>{};
  TrialResource next = trial;
  next.status = std::move(status);
  return std::vector<Mutation>{{std::string(key), generation, std::move(next)}};
}

}  // namespace tunectl::controller
