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

#ifndef TUNECTL_SUGGEST_GRID_SEARCH_H_
#define TUNECTL_SUGGEST_GRID_SEARCH_H_

#include <cstdint>
#include <optional>

#include "tunectl/suggest/algorithm.h"

namespace tunectl::suggest {

// Cross product in declaration order, last parameter varying fastest. The
// cursor lives in the state; a batch that reaches the end sets `exhausted`.
class GridSearch : public SuggestionAlgorithm {
 public:
  std::string_view name() const override { return "grid"; }
  absl::StatusOr<SuggestionBatch> GetSuggestions(const SuggestionRequest& request) const override;
};

// Size of the full grid, or nullopt if it does not fit in 63 bits.
std::optional<std::uint64_t> GridSize(const ExperimentSpec& spec);

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_GRID_SEARCH_H_
