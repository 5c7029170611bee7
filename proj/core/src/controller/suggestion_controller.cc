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
#include "tunectl/common/numeric_format.h"
#include "tunectl/controller/controllers.h"

namespace tunectl::controller {
namespace {

suggest::TrialObservation Observe(const TrialResource& trial) {
  suggest::TrialObservation observation;
  observation.assignments = trial.spec.run_spec.parameter_assignments;
  if (trial.status.phase == TrialPhase::kSucceeded) {
    observation.status = suggest::ObservationStatus::kSucceeded;
    observation.objective_value = trial.status.observation;
  } else {
    observation.status = suggest::ObservationStatus::kFailed;
  }
  if (const auto* budget = FindAssignment(observation.assignments, kBudgetParameter)) {
    observation.resource_consumed = ParseDouble(budget->value);
  }
  return observation;
}

}  // namespace

absl::StatusOr<std::vector<Mutation>> ReconcileSuggestion(const ResourceStore& store,
                                                          std::string_view key,
                                                          const ControllerContext& context) {
  auto loaded = GetAs<SuggestionResource>(store, key);
  if (!loaded) return absl::NotFoundError(absl::StrCat("no suggestion ", std::string(key)));
  const auto& [suggestion, generation] = *loaded;
  const std::string ns(key.substr(kSuggestionPrefix.size(),
                                  key.find('/', kSuggestionPrefix.size()) - kSuggestionPrefix.size()));
  const std::string& experiment_name = suggestion.spec.experiment_name;
  auto experiment = GetAs<ExperimentResource>(store, ExperimentKey(ns, experiment_name));
  if (!experiment) return absl::NotFoundError(absl::StrCat("no experiment for ", std::string(key)));

  TrialBackend& backend = *context.backend;
  SuggestionStatus status = suggestion.status;
  if (IsTerminal(experiment->first.status.phase)) {
    backend.ReleaseAlgorithmService(ns, experiment_name);
    status.service_ready = false;
  } else {
    if (absl::Status ensured = backend.EnsureAlgorithmService(ns, experiment_name); !ensured.ok()) {
      return ensured;
    }
    status.service_ready = backend.AlgorithmServiceReady(ns, experiment_name);
    const int missing = suggestion.spec.requested - static_cast<int>(status.produced.size());
    if (status.service_ready && missing > 0 && !status.exhausted && status.error.empty()) {
      const std::vector<TrialEntry> trials = TrialsOf(store, ns, experiment_name);
      suggest::SuggestionRequest request;
      request.experiment = &experiment->first.spec;
      request.count = missing;
      request.state = status.algorithm_state;
      std::map<std::string, const TrialResource*> by_name;
      for (const auto& entry : trials) {
        by_name[entry.trial.spec.run_spec.trial_name] = &entry.trial;
        if (IsTerminal(entry.trial.status.phase)) request.history.push_back(Observe(entry.trial));
      }
      for (const auto& produced : status.produced) {
        auto it = by_name.find(produced.trial_name);
        if (!produced.consumed() || it == by_name.end() || !IsTerminal(it->second->status.phase)) {
          request.pending.push_back(produced.assignments);
        }
      }
      auto batch = suggest::GetSuggestions(*context.registry, request);
      if (!batch.ok()) {
        status.error = std::string(batch.status().message());
      } else {
        for (auto& assignments : batch->assignments) {
          status.produced.push_back({std::move(assignments), ""});
        }
        status.algorithm_state = std::move(batch->state);
        status.exhausted = batch->exhausted;
      }
    }
  }

  if (status == suggestion.status) return std::vector<Mutation>{};
  SuggestionResource next = suggestion;
  next.status = std::move(status);
  return std::vector<Mutation>{{std::string(key), generation, std::move(next)}};
}

}  // namespace tunectl::controller
