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

#include "tunectl/suggest/algorithm.h"

#include "absl/strings/str_cat.h"
#include "tunectl/suggest/bayesian_optimization.h"
#include "tunectl/suggest/grid_search.h"
#include "tunectl/suggest/hyperband.h"
#include "tunectl/suggest/random_search.h"
#include "tunectl/suggest/tpe.h"

namespace tunectl::suggest {

std::string SuggestionAlgorithm::FreshState(const ExperimentSpec&) const {
  return nlohmann::json{{"algorithm", std::string(name())}, {"issued", 0}}.dump();
}

absl::StatusOr<nlohmann::json> LoadState(const SuggestionAlgorithm& algorithm,
                                         const SuggestionRequest& request) {
  const std::string text =
      request.state.empty() ? algorithm.FreshState(*request.experiment) : request.state;
  nlohmann::json state = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!state.is_object() || !state.contains("algorithm") || !state["algorithm"].is_string()) {
    return absl::InvalidArgumentError("malformed algorithm state");
  }
  if (state["algorithm"].get<std::string>() != algorithm.name()) {
    return absl::FailedPreconditionError(
        absl::StrCat("state belongs to algorithm '", state["algorithm"].get<std::string>(),
                     "', not '", std::string(algorithm.name()), "'"));
  }
  return state;
}

std::uint64_t IssuedCount(const nlohmann::json& state) {
  return state.value("issued", std::uint64_t{0});
}

double Minimized(const ExperimentSpec& spec, double value) {
  return spec.objective.type == ObjectiveType::kMinimize ? value : -value;
}

absl::Status CheckRequest(const SuggestionRequest& request) {
  if (request.experiment == nullptr) return absl::InvalidArgumentError("request has no experiment");
  if (request.count < 1) return absl::InvalidArgumentError("count must be >= 1");
  for (const auto& observation : request.history) {
    const bool succeeded = observation.status == ObservationStatus::kSucceeded;
    if (succeeded != observation.objective_value.has_value()) {
      return absl::InvalidArgumentError(
          "an observation carries an objective value iff it succeeded");
    }
  }
  return absl::OkStatus();
}

std::vector<AssignmentSet> TakenAssignments(const SuggestionRequest& request) {
  std::vector<AssignmentSet> taken;
  taken.reserve(request.history.size() + request.pending.size());
  for (const auto& observation : request.history) taken.push_back(observation.assignments);
  taken.insert(taken.end(), request.pending.begin(), request.pending.end());
  return taken;
}

void AlgorithmRegistry::Register(AlgorithmRules rules,
                                 std::unique_ptr<SuggestionAlgorithm> algorithm) {
  std::string key(algorithm->name());
  context_.algorithms.insert_or_assign(key, std::move(rules));
  algorithms_.insert_or_assign(std::move(key), std::move(algorithm));
}

const SuggestionAlgorithm* AlgorithmRegistry::Find(std::string_view name) const {
  auto it = algorithms_.find(name);
  return it == algorithms_.end() ? nullptr : it->second.get();
}

std::unique_ptr<AlgorithmRegistry> AlgorithmRegistry::WithBuiltins() {
  auto registry = std::make_unique<AlgorithmRegistry>();
  const ValidationContext& builtin = BuiltinValidationContext();
  registry->context_.simulated_functions = builtin.simulated_functions;
  auto rules = [&builtin](std::string_view name) { return builtin.algorithms.find(name)->second; };
  registry->Register(rules("random"), std::make_unique<RandomSearch>());
  registry->Register(rules("grid"), std::make_unique<GridSearch>());
  registry->Register(rules("bayesianoptimization"), std::make_unique<BayesianOptimization>());
  registry->Register(rules("tpe"), std::make_unique<TreeParzenEstimator>());
  registry->Register(rules("hyperband"), std::make_unique<Hyperband>());
  return registry;
}

const AlgorithmRegistry& AlgorithmRegistry::Builtin() {
  static const AlgorithmRegistry* registry = WithBuiltins().release();
  return *registry;
}

absl::StatusOr<SuggestionBatch> GetSuggestions(const AlgorithmRegistry& registry,
                                               const SuggestionRequest& request) {
  if (request.experiment == nullptr) return absl::InvalidArgumentError("request has no experiment");
  const SuggestionAlgorithm* algorithm =
      registry.Find(request.experiment->algorithm.algorithm_name);
  if (algorithm == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("no algorithm named '", request.experiment->algorithm.algorithm_name, "'"));
  }
  return algorithm->GetSuggestions(request);
}

}  // namespace tunectl::suggest
