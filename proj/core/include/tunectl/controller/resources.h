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

#ifndef TUNECTL_CONTROLLER_RESOURCES_H_
#define TUNECTL_CONTROLLER_RESOURCES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"

namespace tunectl::controller {

enum class ExperimentPhase { kCreated, kRunning, kSucceeded, kFailed };
enum class TrialPhase { kCreated, kPending, kRunning, kSucceeded, kFailed };

std::string_view ToString(ExperimentPhase phase);
std::string_view ToString(TrialPhase phase);
std::optional<ExperimentPhase> ParseExperimentPhase(std::string_view text);
std::optional<TrialPhase> ParseTrialPhase(std::string_view text);

inline bool IsTerminal(ExperimentPhase phase) {
  return phase == ExperimentPhase::kSucceeded || phase == ExperimentPhase::kFailed;
}
inline bool IsTerminal(TrialPhase phase) {
  return phase == TrialPhase::kSucceeded || phase == TrialPhase::kFailed;
}

struct OptimalTrial {
  std::string trial_name;
  AssignmentSet assignments;
  double objective_value = 0.0;

  bool operator==(const OptimalTrial&) const = default;
};

struct ExperimentStatus {
  ExperimentPhase phase = ExperimentPhase::kCreated;
  int trials_spawned = 0;
  // Created or Pending.
  int trials_pending = 0;
  int trials_running = 0;
  int trials_succeeded = 0;
  int trials_failed = 0;
  std::optional<OptimalTrial> current_optimal;
  std::string message;

  bool operator==(const ExperimentStatus&) const = default;
};

struct ExperimentResource {
  ExperimentSpec spec;
  ExperimentStatus status;

  bool operator==(const ExperimentResource&) const = default;
};

struct ProducedAssignment {
  AssignmentSet assignments;
  // Set once a trial was spawned for it; never changes afterwards.
  std::string trial_name;

  bool consumed() const { return !trial_name.empty(); }
  bool operator==(const ProducedAssignment&) const = default;
};

struct SuggestionSpec {
  std::string experiment_name;
  std::string algorithm_name;
  // Running total of assignments asked for; only grows.
  int requested = 0;

  bool operator==(const SuggestionSpec&) const = default;
};

struct SuggestionStatus {
  std::vector<ProducedAssignment> produced;
  std::string algorithm_state;
  bool service_ready = false;
  bool exhausted = false;
  // Set when the algorithm returned an error; the experiment then fails.
  std::string error;

  bool operator==(const SuggestionStatus&) const = default;
};

struct SuggestionResource {
  SuggestionSpec spec;
  SuggestionStatus status;

  bool operator==(const SuggestionResource&) const = default;
};

struct TrialSpec {
  std::string experiment_name;
  int index = 0;
  TrialRunSpec run_spec;
  int worker_count = 1;
  double cpu_per_worker = 1.0;
  RestartPolicy restart_policy = RestartPolicy::kNever;
  // Set when rendering the template failed; the trial fails without running.
  std::string render_error;

  bool operator==(const TrialSpec&) const = default;
};

struct TrialStatus {
  TrialPhase phase = TrialPhase::kCreated;
  int restart_count = 0;
  std::optional<double> observation;
  std::map<std::string, double> additional_metrics;
  std::string reason;
  // Clock reading when the trial reached a terminal phase.
  std::optional<std::int64_t> finish_time;
  int submit_failures = 0;
  std::int64_t next_submit_time = 0;

  bool operator==(const TrialStatus&) const = default;
};

struct TrialResource {
  TrialSpec spec;
  TrialStatus status;

  bool operator==(const TrialResource&) const = default;
};

using Resource = std::variant<ExperimentResource, SuggestionResource, TrialResource>;

std::string ExperimentKey(std::string_view ns, std::string_view name);
std::string SuggestionKey(std::string_view ns, std::string_view experiment);
std::string TrialKey(std::string_view ns, std::string_view experiment, std::string_view trial);
// Prefix of every trial key of one experiment.
std::string TrialPrefix(std::string_view ns, std::string_view experiment);
inline constexpr std::string_view kExperimentPrefix = "experiments/";
inline constexpr std::string_view kSuggestionPrefix = "suggestions/";
inline constexpr std::string_view kTrialPrefix = "trials/";

// `<experiment>-<index>` with the index zero-padded to four digits.
std::string TrialName(std::string_view experiment, int index);

// Canonical YAML with a `kind` discriminator, byte-stable.
std::string ResourceToYaml(const Resource& resource);
// Experiment specs are re-validated against `context`.
absl::StatusOr<Resource> ResourceFromYaml(
    std::string_view text, const ValidationContext& context = BuiltinValidationContext());

}  // namespace tunectl::controller

#endif  // TUNECTL_CONTROLLER_RESOURCES_H_
