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

#include "tunectl/suggest/grid_search.h"

#include <limits>

#include "tunectl/common/status_macros.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::suggest {

std::optional<std::uint64_t> GridSize(const ExperimentSpec& spec) {
  std::uint64_t total = 1;
  constexpr std::uint64_t kLimit = std::numeric_limits<std::int64_t>::max();
  for (const auto& parameter : spec.parameters) {
    std::uint64_t n = 0;
    if (const auto* list = parameter.list()) {
      n = list->values.size();
    } else if (parameter.type == ParameterType::kInt || parameter.range()->step) {
      n = GridValues(parameter).size();
    } else {
      return std::nullopt;
    }
    if (n != 0 && total > kLimit / n) return std::nullopt;
    total *= n;
  }
  return total;
}

absl::StatusOr<SuggestionBatch> GridSearch::GetSuggestions(
    const SuggestionRequest& request) const {
  TUNECTL_RETURN_IF_ERROR(CheckRequest(request));
  TUNECTL_ASSIGN_OR_RETURN(nlohmann::json state, LoadState(*this, request));
  const ExperimentSpec& spec = *request.experiment;
  const std::optional<std::uint64_t> total = GridSize(spec);
  if (!total) return absl::InvalidArgumentError("grid is unbounded or too large to enumerate");

  std::vector<std::vector<std::string>> axes;
  for (const auto& parameter : spec.parameters) axes.push_back(GridValues(parameter));

  std::uint64_t cursor = IssuedCount(state);
  SuggestionBatch batch;
  for (int i = 0; i < request.count && cursor < *total; ++i, ++cursor) {
    AssignmentSet point(axes.size());
    std::uint64_t rest = cursor;
    for (std::size_t j = axes.size(); j-- > 0;) {
      point[j] = {spec.parameters[j].name, axes[j][rest % axes[j].size()]};
      rest /= axes[j].size();
    }
    batch.assignments.push_back(std::move(point));
  }
  state["issued"] = cursor;
  batch.exhausted = cursor >= *total;
  batch.state = state.dump();
  return batch;
}

}  // namespace tunectl::suggest
