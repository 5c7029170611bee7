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

// YAML experiment file format. See docs/experiment-format.md for the schema.

#ifndef TUNECTL_MODEL_EXPERIMENT_YAML_H_
#define TUNECTL_MODEL_EXPERIMENT_YAML_H_

#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"

namespace tunectl {

// Parses and validates an experiment document. Syntax errors carry the line
// and column; semantic errors are aggregated into one InvalidArgument status,
// one issue per line. Defaults (metricCollectorKind=pull,
// maxFailedTrialCount=0, ...) are applied.
absl::StatusOr<ExperimentSpec> ParseExperiment(
    std::string_view text, const ValidationContext& context = BuiltinValidationContext());

// Same as ParseExperiment, also returning the individual issues.
absl::StatusOr<ExperimentSpec> ParseExperiment(std::string_view text,
                                               const ValidationContext& context,
                                               IssueSink* issues);

// Reads an already-loaded node, e.g. the `spec` of a persisted resource.
absl::StatusOr<ExperimentSpec> ExperimentFromNode(const YAML::Node& node,
                                                  const ValidationContext& context);

// Byte-stable emission with a fixed key order and every default spelled out.
std::string CanonicalYaml(const ExperimentSpec& spec);
void EmitExperiment(YAML::Emitter& out, const ExperimentSpec& spec);

// Shared helpers for other canonical emitters.
void EmitAssignments(YAML::Emitter& out, const AssignmentSet& assignments);
absl::StatusOr<AssignmentSet> AssignmentsFromNode(const YAML::Node& node);

}  // namespace tunectl

#endif  // TUNECTL_MODEL_EXPERIMENT_YAML_H_
