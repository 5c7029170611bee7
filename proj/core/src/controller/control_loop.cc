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

#include "tunectl/controller/control_loop.h"

#include <thread>

#include <glog/logging.h>

#include "absl/strings/str_cat.h"

namespace tunectl::controller {
namespace {

// Guards against controllers that never converge.
constexpr int kMaxPasses = 10000;

using Reconciler = absl::StatusOr<std::vector<Mutation>> (*)(const ResourceStore&,
                                                             std::string_view,
                                                             const ControllerContext&);

}  // namespace

absl::StatusOr<bool> ControlLoop::Step(const std::function<bool()>& stop) {
  const std::pair<std::string_view, Reconciler> controllers[] = {
      {kTrialPrefix, &ReconcileTrial},
      {kExperimentPrefix, &ReconcileExperiment},
      {kSuggestionPrefix, &ReconcileSuggestion},
  };
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool changed = false;
    for (const auto& [prefix, reconcile] : controllers) {
      for (const std::string& key : store_->Keys(prefix)) {
        if (stop && stop()) return false;
        ++reconcile_count_;
        auto mutations = reconcile(*store_, key, context_);
        if (!mutations.ok()) {
          LOG(WARNING) << "reconcile " << key << ": " << mutations.status();
          continue;
        }
        if (mutations->empty()) continue;
        absl::Status applied = store_->Apply(*mutations);
        if (applied.ok() || absl::IsAborted(applied)) {
          // A conflict is retried on the next pass.
          changed = true;
        } else {
          LOG(WARNING) << "apply " << key << ": " << applied;
        }
      }
    }
    if (!changed) return true;
  }
  return absl::InternalError("control loop did not converge");
}

bool ControlLoop::Finished() const {
  for (const auto& key : store_->Keys(kExperimentPrefix)) {
    auto experiment = GetAs<ExperimentResource>(*store_, key);
    if (!experiment || !IsTerminal(experiment->first.status.phase)) return false;
    const ExperimentSpec& spec = experiment->first.spec;
    for (const auto& entry : TrialsOf(*store_, spec.namespace_name, spec.name)) {
      if (!IsTerminal(entry.trial.status.phase)) return false;
    }
  }
  return true;
}

absl::Status ControlLoop::Run(std::chrono::milliseconds poll, const std::function<bool()>& stop) {
  while (true) {
    auto completed = Step(stop);
    if (!completed.ok()) return completed.status();
    if (!*completed || Finished()) return absl::OkStatus();
    std::this_thread::sleep_for(poll);
  }
}

absl::Status SubmitExperiment(ResourceStore& store, const ExperimentSpec& spec) {
  ExperimentResource experiment;
  experiment.spec = spec;
  absl::Status status =
      store.Apply({Mutation{ExperimentKey(spec.namespace_name, spec.name), 0, experiment}});
  if (absl::IsAlreadyExists(status)) {
    return absl::AlreadyExistsError(absl::StrCat("experiment ", spec.namespace_name, "/",
                                                 spec.name, " already exists"));
  }
  return status;
}

}  // namespace tunectl::controller
