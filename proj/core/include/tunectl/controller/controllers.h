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

#ifndef TUNECTL_CONTROLLER_CONTROLLERS_H_
#define TUNECTL_CONTROLLER_CONTROLLERS_H_

#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/controller/resource_store.h"
#include "tunectl/controller/trial_backend.h"
#include "tunectl/metrics/metric_point.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::controller {

struct ControllerContext {
  const suggest::AlgorithmRegistry* registry = nullptr;
  metrics::ObservationStore* metrics = nullptr;
  TrialBackend* backend = nullptr;
};

// Each reconcile reads the store and returns the mutations that move one
// resource toward its desired state. An empty list means nothing to do;
// repeating a reconcile on unchanged inputs yields an empty list.

// Counts trials, tracks the best one, decides terminal phases, grows the
// suggestion request and spawns trials for fresh suggestions.
absl::StatusOr<std::vector<Mutation>> ReconcileExperiment(const ResourceStore& store,
                                                          std::string_view key,
                                                          const ControllerContext& context);

// Keeps the algorithm service alive while the experiment runs and fills the
// suggestion up to its requested total.
absl::StatusOr<std::vector<Mutation>> ReconcileSuggestion(const ResourceStore& store,
                                                          std::string_view key,
                                                          const ControllerContext& context);

// Submits the trial's job and mirrors the job's phase, restarting temporary
// failures when the policy allows.
absl::StatusOr<std::vector<Mutation>> ReconcileTrial(const ResourceStore& store,
                                                     std::string_view key,
                                                     const ControllerContext& context);

struct TrialEntry {
  std::string key;
  TrialResource trial;
  std::uint64_t generation;
};

// Trials of one experiment ordered by index.
std::vector<TrialEntry> TrialsOf(const ResourceStore& store, std::string_view ns,
                                 std::string_view experiment);

}  // namespace tunectl::controller

#endif  // TUNECTL_CONTROLLER_CONTROLLERS_H_
