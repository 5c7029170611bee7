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

#ifndef TUNECTL_MODEL_TRIAL_TEMPLATE_H_
#define TUNECTL_MODEL_TRIAL_TEMPLATE_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"

namespace tunectl {

// Placeholder syntax:
//   ${<parameter>}       the parameter's assigned value
//   ${trial.name}        the trial's name
//   ${trial.namespace}   the trial's namespace
//   ${hyperparameters}   every assignment as `--name=value`, space-joined
inline constexpr std::string_view kTrialNamePlaceholder = "trial.name";
inline constexpr std::string_view kTrialNamespacePlaceholder = "trial.namespace";
inline constexpr std::string_view kHyperparametersPlaceholder = "hyperparameters";

// Names referenced by `${...}` in order of appearance. Fails on an
// unterminated or empty placeholder.
absl::StatusOr<std::vector<std::string>> ListPlaceholders(std::string_view text);

// Substitutes every placeholder. Pure and deterministic.
absl::StatusOr<TrialRunSpec> RenderTrialSpec(const TrialTemplate& trial_template,
                                             const AssignmentSet& assignments,
                                             std::string_view trial_name,
                                             std::string_view namespace_name);

}  // namespace tunectl

#endif  // TUNECTL_MODEL_TRIAL_TEMPLATE_H_
