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

#include "tunectl/suggest/hyperband.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tunectl/common/numeric_format.h"
#include "tunectl/common/rng.h"
#include "tunectl/common/status_macros.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::suggest {
namespace {

constexpr int kMaxResampleAttempts = 10;

std::int64_t IntPow(std::int64_t base, int exponent) {
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

AssignmentSet WithoutBudget(const AssignmentSet& assignments) {
  AssignmentSet out;
  for (const auto& a : assignments) {
    if (a.name != kBudgetParameter) out.push_back(a);
  }
  return out;
}

nlohmann::json ToJson(const AssignmentSet& assignments) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : assignments) out.push_back({a.name, a.value});
  return out;
}

AssignmentSet FromJson(const nlohmann::json& json) {
  AssignmentSet out;
  for (const auto& pair : json) out.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
  return out;
}

}  // namespace

HyperbandSettings HyperbandSettings::FromSpec(const ExperimentSpec& spec) {
  HyperbandSettings settings;
  const auto& map = spec.algorithm.settings;
  if (auto it = map.find("max_resource"); it != map.end()) {
    settings.max_resource = ParseInt(it->second).value_or(settings.max_resource);
  }
  if (auto it = map.find("eta"); it != map.end()) {
    settings.eta = ParseInt(it->second).value_or(settings.eta);
  }
  return settings;
}

int HyperbandMaxBracket(std::int64_t max_resource, std::int64_t eta) {
  int s = 0;
  std::int64_t power = eta;
  while (power <= max_resource) {
    ++s;
    power *= eta;
  }
  return s;
}

std::vector<std::vector<HyperbandRung>> HyperbandSchedule(std::int64_t max_resource,
                                                          std::int64_t eta) {
  const int smax = HyperbandMaxBracket(max_resource, eta);
  std::vector<std::vector<HyperbandRung>> brackets;
  for (int s = smax; s >= 0; --s) {
    const auto eta_s = IntPow(eta, s);
    // ceil((smax + 1) * eta^s / (s + 1)) in exact integer arithmetic.
    const std::int64_t n = ((smax + 1) * eta_s + s) / (s + 1);
    std::vector<HyperbandRung> rungs;
    for (int i = 0; i <= s; ++i) {
      rungs.push_back({s, i, n / IntPow(eta, i),
                       static_cast<double>(max_resource) / static_cast<double>(IntPow(eta, s - i))});
    }
    brackets.push_back(std::move(rungs));
  }
  return brackets;
}

std::vector<std::size_t> PromoteTop(const std::vector<std::optional<double>>& scores,
                                    std::size_t keep) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    if (!scores[a] || !scores[b]) return scores[a].has_value() && !scores[b].has_value();
    return *scores[a] < *scores[b];
  });
  order.resize(std::min(keep, order.size()));
  return order;
}

std::optional<double> HyperbandResourceFraction(const ExperimentSpec& spec,
                                                const AssignmentSet& assignments) {
  if (spec.algorithm.algorithm_name != "hyperband") return std::nullopt;
  const auto* budget = FindAssignment(assignments, kBudgetParameter);
  if (budget == nullptr) return std::nullopt;
  auto value = ParseDouble(budget->value);
  if (!value) return std::nullopt;
  return std::clamp(*value / static_cast<double>(HyperbandSettings::FromSpec(spec).max_resource),
                    0.0, 1.0);
}

std::string Hyperband::FreshState(const ExperimentSpec& spec) const {
  const HyperbandSettings settings = HyperbandSettings::FromSpec(spec);
  return nlohmann::json{{"algorithm", std::string(name())},
                        {"issued", 0},
                        {"bracket", HyperbandMaxBracket(settings.max_resource, settings.eta)},
                        {"rung", 0},
                        {"configs", nlohmann::json::array()},
                        {"rungIssued", 0},
                        {"exhausted", false}}
      .dump();
}

absl::StatusOr<SuggestionBatch> Hyperband::GetSuggestions(const SuggestionRequest& request) const {
  TUNECTL_RETURN_IF_ERROR(CheckRequest(request));
  TUNECTL_ASSIGN_OR_RETURN(nlohmann::json state, LoadState(*this, request));
  const ExperimentSpec& spec = *request.experiment;
  for (const auto& observation : request.history) {
    if (!observation.resource_consumed) {
      return absl::InvalidArgumentError("hyperband requires resourceConsumed on every observation");
    }
  }
  const HyperbandSettings settings = HyperbandSettings::FromSpec(spec);
  const auto schedule = HyperbandSchedule(settings.max_resource, settings.eta);
  const int smax = HyperbandMaxBracket(settings.max_resource, settings.eta);
  const std::uint64_t random_state = RandomState(spec);

  int bracket = state.value("bracket", smax);
  int rung = state.value("rung", 0);
  std::size_t rung_issued = state.value("rungIssued", std::size_t{0});
  std::uint64_t issued = IssuedCount(state);
  bool exhausted = state.value("exhausted", false);
  std::vector<AssignmentSet> configs;
  for (const auto& config : state["configs"]) configs.push_back(FromJson(config));

  SuggestionBatch batch;
  while (!exhausted && batch.assignments.size() < static_cast<std::size_t>(request.count)) {
    const HyperbandRung& plan = schedule[static_cast<std::size_t>(smax - bracket)]
                                        [static_cast<std::size_t>(rung)];
    if (rung == 0 && configs.empty() && rung_issued == 0) {
      std::vector<AssignmentSet> taken;
      for (const auto& observation : request.history) {
        taken.push_back(WithoutBudget(observation.assignments));
      }
      for (std::int64_t j = 0; j < plan.configs; ++j) {
        AssignmentSet candidate;
        for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
          Rng rng(DeriveSeed(random_state, "hyperband", bracket, j, attempt));
          candidate = SampleAssignment(spec.parameters, rng);
          if (!ContainsAssignment(taken, candidate) && !ContainsAssignment(configs, candidate)) break;
        }
        configs.push_back(std::move(candidate));
      }
    }
    if (rung_issued < configs.size()) {
      AssignmentSet next = configs[rung_issued++];
      next.push_back({std::string(kBudgetParameter), FormatDouble(plan.resource)});
      batch.assignments.push_back(std::move(next));
      ++issued;
      continue;
    }
    // Every config of this rung is out; wait until all have results.
    std::vector<std::optional<double>> scores(configs.size());
    bool complete = true;
    for (std::size_t c = 0; c < configs.size() && complete; ++c) {
      bool found = false;
      for (const auto& observation : request.history) {
        if (std::abs(*observation.resource_consumed - plan.resource) > 1e-9 * plan.resource) {
          continue;
        }
        if (WithoutBudget(observation.assignments) != configs[c]) continue;
        found = true;
        if (observation.objective_value) scores[c] = Minimized(spec, *observation.objective_value);
        break;
      }
      complete = found;
    }
    if (!complete) break;
    if (rung < bracket) {
      std::vector<AssignmentSet> promoted;
      const auto keep = static_cast<std::size_t>(plan.configs / settings.eta);
      for (std::size_t index : PromoteTop(scores, keep)) promoted.push_back(configs[index]);
      configs = std::move(promoted);
      ++rung;
    } else if (bracket == 0) {
      exhausted = true;
    } else {
      --bracket;
      rung = 0;
      configs.clear();
    }
    rung_issued = 0;
  }

  nlohmann::json config_json = nlohmann::json::array();
  for (const auto& config : configs) config_json.push_back(ToJson(config));
  state["bracket"] = bracket;
  state["rung"] = rung;
  state["rungIssued"] = rung_issued;
  state["issued"] = issued;
  state["configs"] = std::move(config_json);
  state["exhausted"] = exhausted;
  batch.exhausted = exhausted;
  batch.state = state.dump();
  return batch;
}

}  // namespace tunectl::suggest
