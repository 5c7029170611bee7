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

#ifndef TUNECTL_SUGGEST_ALGORITHM_H_
#define TUNECTL_SUGGEST_ALGORITHM_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"

namespace tunectl::suggest {

enum class ObservationStatus { kSucceeded, kFailed };

struct TrialObservation {
  AssignmentSet assignments;
  // Present iff status is kSucceeded.
  std::optional<double> objective_value;
  ObservationStatus status = ObservationStatus::kSucceeded;
  // Budget the trial ran with; required by hyperband.
  std::optional<double> resource_consumed;
};

struct SuggestionRequest {
  const ExperimentSpec* experiment = nullptr;
  // Completed trials in creation order.
  std::vector<TrialObservation> history;
  // Issued assignments without a result yet.
  std::vector<AssignmentSet> pending;
  int count = 1;
  // Opaque state from a previous batch; empty means fresh.
  std::string state;
};

struct SuggestionBatch {
  std::vector<AssignmentSet> assignments;
  std::string state;
  // The search space has no further points to offer.
  bool exhausted = false;
};

// A search strategy. Implementations are stateless; everything carried
// between calls lives in the opaque state string, so a batch of k equals k
// batches of one.
class SuggestionAlgorithm {
 public:
  virtual ~SuggestionAlgorithm() = default;

  virtual std::string_view name() const = 0;
  virtual std::string FreshState(const ExperimentSpec& spec) const;
  virtual absl::StatusOr<SuggestionBatch> GetSuggestions(
      const SuggestionRequest& request) const = 0;
};

// Decodes `request.state` (or a fresh state) and checks it belongs to
// `algorithm`.
absl::StatusOr<nlohmann::json> LoadState(const SuggestionAlgorithm& algorithm,
                                         const SuggestionRequest& request);

// Number of suggestions issued so far, tracked in every state document.
std::uint64_t IssuedCount(const nlohmann::json& state);

// Objective values oriented so that smaller is better.
double Minimized(const ExperimentSpec& spec, double value);

absl::Status CheckRequest(const SuggestionRequest& request);

// History assignments plus pending ones; used for duplicate avoidance.
std::vector<AssignmentSet> TakenAssignments(const SuggestionRequest& request);

class AlgorithmRegistry {
 public:
  // Registers `algorithm` under its name with admission rules. Replaces an
  // existing entry of the same name.
  void Register(AlgorithmRules rules, std::unique_ptr<SuggestionAlgorithm> algorithm);

  const SuggestionAlgorithm* Find(std::string_view name) const;

  // Builtin simulated functions plus every registered algorithm's rules.
  const ValidationContext& validation_context() const { return context_; }

  // random, grid, bayesianoptimization, tpe and hyperband.
  static std::unique_ptr<AlgorithmRegistry> WithBuiltins();
  static const AlgorithmRegistry& Builtin();

 private:
  std::map<std::string, std::unique_ptr<SuggestionAlgorithm>, std::less<>> algorithms_;
  ValidationContext context_;
};

// Dispatches to the registered algorithm named by the experiment.
absl::StatusOr<SuggestionBatch> GetSuggestions(const AlgorithmRegistry& registry,
                                               const SuggestionRequest& request);

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_ALGORITHM_H_
