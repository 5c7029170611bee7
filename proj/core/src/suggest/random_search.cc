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

#include "tunectl/suggest/random_search.h"

#include "tunectl/common/status_macros.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::suggest {

absl::StatusOr<SuggestionBatch> RandomSearch::GetSuggestions(
    const SuggestionRequest& request) const {
  TUNECTL_RETURN_IF_ERROR(CheckRequest(request));
  TUNECTL_ASSIGN_OR_RETURN(nlohmann::json state, LoadState(*this, request));
  std::uint64_t issued = IssuedCount(state);
  std::vector<AssignmentSet> taken = TakenAssignments(request);
  SuggestionBatch batch;
  for (int i = 0; i < request.count; ++i) {
    AssignmentSet next = SampleDistinct(*request.experiment, issued++, taken);
    taken.push_back(next);
    batch.assignments.push_back(std::move(next));
  }
  state["issued"] = issued;
  batch.state = state.dump();
  return batch;
}

}  // namespace tunectl::suggest
