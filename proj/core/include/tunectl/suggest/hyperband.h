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

#ifndef TUNECTL_SUGGEST_HYPERBAND_H_
#define TUNECTL_SUGGEST_HYPERBAND_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "tunectl/suggest/algorithm.h"

namespace tunectl::suggest {

struct HyperbandSettings {
  std::int64_t max_resource = 81;
  std::int64_t eta = 3;

  static HyperbandSettings FromSpec(const ExperimentSpec& spec);
};

struct HyperbandRung {
  int bracket;
  int rung;
  std::int64_t configs;
  double resource;

  bool operator==(const HyperbandRung&) const = default;
};

// floor(log_eta(max_resource)), computed exactly.
int HyperbandMaxBracket(std::int64_t max_resource, std::int64_t eta);

// All brackets from s = smax down to 0; each holds its rungs in order.
std::vector<std::vector<HyperbandRung>> HyperbandSchedule(std::int64_t max_resource,
                                                          std::int64_t eta);

// Indices of the `keep` best entries. Scores are minimized; missing scores
// (failed trials) rank last and ties keep the earlier index.
std::vector<std::size_t> PromoteTop(const std::vector<std::optional<double>>& scores,
                                    std::size_t keep);

// budget / max_resource for hyperband experiments, nullopt otherwise.
std::optional<double> HyperbandResourceFraction(const ExperimentSpec& spec,
                                                const AssignmentSet& assignments);

// Successive-halving brackets. Each assignment set carries an extra `budget`
// entry. A batch can be shorter than requested while a rung waits for its
// results; the search is exhausted after bracket 0 completes.
class Hyperband : public SuggestionAlgorithm {
 public:
  std::string_view name() const override { return "hyperband"; }
  std::string FreshState(const ExperimentSpec& spec) const override;
  absl::StatusOr<SuggestionBatch> GetSuggestions(const SuggestionRequest& request) const override;
};

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_HYPERBAND_H_
