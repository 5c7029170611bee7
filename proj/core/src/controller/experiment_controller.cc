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
#include "tunectl/model/trial_template.h"
#include "tunectl/suggest/hyperband.h"

namespace tunectl::controller {
namespace {

TrialResource SpawnTrial(const ExperimentSpec& spec, int index, const AssignmentSet& assignments) {
  TrialResource trial;
  trial.spec.experiment_name = spec.name;
  trial.spec.index = index;
  trial.spec.worker_count = spec.trial_template.worker_count;
  trial.spec.cpu_per_worker = spec.trial_template.cpu_per_worker;
  trial.spec.restart_policy = spec.trial_template.restart_policy;
  const std::string name = TrialName(spec.name, index);
  auto rendered = RenderTrialSpec(spec.trial_template, assignments, name, spec.namespace_name);
  if (rendered.ok()) {
    trial.spec.run_spec = *std::move(rendered);
  } else {
    trial.spec.run_spec.trial_name = name;
    trial.spec.run_spec.namespace_name = spec.namespace_name;
    trial.spec.run_spec.parameter_assignments = assignments;
    trial.spec.run_spec.resolved_payload = std::string();
    trial.spec.render_error = std::string(rendered.status().message());
  }
  if (auto fraction = suggest::HyperbandResourceFraction(spec, assignments)) {
    trial.spec.run_spec.resource_fraction = *fraction;
  }
  return trial;
}

void Count(const std::vector<TrialEntry>& trials, ExperimentStatus& status) {
  status.trials_spawned = static_cast<int>(trials.size());
  status.trials_pending = status.trials_running = 0;
  status.trials_succeeded = status.trials_failed = 0;
  for (const auto& entry : trials) {
    switch (entry.trial.status.phase) {
      case TrialPhase::kCreated:
      case TrialPhase::kPending:
        ++status.trials_pending;
        break;
      case TrialPhase::kRunning:
        ++status.trials_running;
        break;
      case TrialPhase::kSucceeded:
        ++status.trials_succeeded;
        break;
      case TrialPhase::kFailed:
        ++status.trials_failed;
        break;
    }
  }
}

std::optional<OptimalTrial> BestTrial(const ExperimentSpec& spec,
                                      const std::vector<TrialEntry>& trials) {
  std::optional<OptimalTrial> best;
  for (const auto& entry : trials) {
    const TrialResource& trial = entry.trial;
    if (trial.status.phase != TrialPhase::kSucceeded || !trial.status.observation) continue;
    const double value = *trial.status.observation;
    if (!best || IsBetter(spec.objective.type, value, best->objective_value)) {
      best = OptimalTrial{trial.spec.run_spec.trial_name, trial.spec.run_spec.parameter_assignments,
                          value};
    }
  }
  return best;
}

}  // namespace

std::vector<TrialEntry> TrialsOf(const ResourceStore& store, std::string_view ns,
                                 std::string_view experiment) {
  std::vector<TrialEntry> out;
  for (const auto& key : store.Keys(TrialPrefix(ns, experiment))) {
    if (auto trial = GetAs<TrialResource>(store, key)) {
      out.push_back({key, std::move(trial->first), trial->second});
    }
  }
  std::sort(out.begin(), out.end(), [](const TrialEntry& a, const TrialEntry& b) {
    return a.trial.spec.index < b.trial.spec.index;
  });
  return out;
}

absl::StatusOr<std::vector<Mutation>> ReconcileExperiment(const ResourceStore& store,
                                                          std::string_view key,
                                                          const ControllerContext&) {
  auto loaded = GetAs<ExperimentResource>(store, key);
  if (!loaded) return absl::NotFoundError(absl::StrCat("no experiment ", std::string(key)));
  const auto& [experiment, generation] = *loaded;
  const ExperimentSpec& spec = experiment.spec;
  const std::string suggestion_key = SuggestionKey(spec.namespace_name, spec.name);

  std::vector<Mutation> mutations;
  std::vector<TrialEntry> trials = TrialsOf(store, spec.namespace_name, spec.name);
  auto suggestion = GetAs<SuggestionResource>(store, suggestion_key);

  ExperimentStatus status = experiment.status;
  Count(trials, status);
  status.current_optimal = BestTrial(spec, trials);
  if (status.phase == ExperimentPhase::kCreated) status.phase = ExperimentPhase::kRunning;

  if (!IsTerminal(status.phase)) {
    const int completed = status.trials_succeeded + status.trials_failed;
    const int active = status.trials_pending + status.trials_running;
    const bool search_done = suggestion && suggestion->first.status.exhausted &&
                             std::all_of(suggestion->first.status.produced.begin(),
                                         suggestion->first.status.produced.end(),
                                         [](const auto& p) { return p.consumed(); });
    if (status.current_optimal && GoalMet(spec.objective, status.current_optimal->objective_value)) {
      status.phase = ExperimentPhase::kSucceeded;
      status.message = "objective goal reached";
    } else if (status.trials_failed > spec.max_failed_trial_count) {
      status.phase = ExperimentPhase::kFailed;
      status.message = "failed trials exceeded maxFailedTrialCount";
    } else if (completed >= spec.max_trial_count) {
      status.phase = ExperimentPhase::kSucceeded;
      status.message = "maxTrialCount trials completed";
    } else if (suggestion && !suggestion->first.status.error.empty()) {
      status.phase = ExperimentPhase::kFailed;
      status.message = absl::StrCat("suggestion error: ", suggestion->first.status.error);
    } else if (search_done && active == 0) {
      status.phase = ExperimentPhase::kSucceeded;
      status.message = "search space exhausted";
    }
  }

  if (!IsTerminal(status.phase)) {
    if (!suggestion) {
      SuggestionResource fresh;
      fresh.spec.experiment_name = spec.name;
      fresh.spec.algorithm_name = spec.algorithm.algorithm_name;
      fresh.spec.requested = std::min(spec.parallel_trial_count, spec.max_trial_count);
      mutations.push_back({suggestion_key, 0, fresh});
    } else {
      SuggestionResource updated = suggestion->first;
      int spawned = status.trials_spawned;
      int active = status.trials_pending + status.trials_running;
      for (auto& produced : updated.status.produced) {
        if (produced.consumed()) continue;
        if (active >= spec.parallel_trial_count || spawned >= spec.max_trial_count) break;
        TrialResource trial = SpawnTrial(spec, spawned, produced.assignments);
        produced.trial_name = trial.spec.run_spec.trial_name;
        mutations.push_back(
            {TrialKey(spec.namespace_name, spec.name, produced.trial_name), 0, std::move(trial)});
        ++spawned;
        ++active;
        ++status.trials_spawned;
        ++status.trials_pending;
      }
      const int free_slots = std::max(spec.parallel_trial_count - active, 0);
      const int remaining = std::max(spec.max_trial_count - spawned, 0);
      updated.spec.requested =
          std::max(updated.spec.requested, spawned + std::min(free_slots, remaining));
      if (!(updated == suggestion->first)) {
        mutations.push_back({suggestion_key, suggestion->second, std::move(updated)});
      }
    }
  }

  if (!(status == experiment.status)) {
    ExperimentResource next = experiment;
    next.status = std::move(status);
    mutations.push_back({std::string(key), generation, std::move(next)});
  }
  return mutations;
}

}  // namespace tunectl::controller
