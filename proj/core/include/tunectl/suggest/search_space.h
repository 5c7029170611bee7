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

#ifndef TUNECTL_SUGGEST_SEARCH_SPACE_H_
#define TUNECTL_SUGGEST_SEARCH_SPACE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunectl/common/rng.h"
#include "tunectl/model/experiment.h"

namespace tunectl::suggest {

// Uniform draw from one parameter's feasible space. Doubles are continuous
// even when a step is declared; ints are uniform over their step lattice.
std::string SampleValue(const ParameterSpec& parameter, Rng& rng);

// One value per parameter, in declaration order.
AssignmentSet SampleAssignment(const std::vector<ParameterSpec>& parameters, Rng& rng);

bool IsFeasible(const ParameterSpec& parameter, std::string_view value);

// True when `assignments` has exactly one feasible entry per parameter, in
// declaration order. Extra trailing entries named in `allowed_extra` pass.
bool IsFeasible(const std::vector<ParameterSpec>& parameters, const AssignmentSet& assignments,
                const std::vector<std::string>& allowed_extra = {});

// Number of integer lattice points of an int range.
std::int64_t IntLatticeSize(const Range& range);

// Ordered grid values of one parameter. Doubles must declare a step.
std::vector<std::string> GridValues(const ParameterSpec& parameter);

// Maps assignments to points in [0,1]^k. Numeric parameters take one
// coordinate; list parameters take one coordinate per value (one-hot).
class UnitEncoder {
 public:
  explicit UnitEncoder(const std::vector<ParameterSpec>& parameters);

  int dimension() const { return dimension_; }
  std::vector<double> Encode(const AssignmentSet& assignments) const;
  // Rounds ints to their lattice and picks the arg-max category.
  AssignmentSet Decode(const std::vector<double>& point) const;

 private:
  struct Slot {
    const ParameterSpec* parameter;
    int offset;
    int width;
  };
  std::vector<Slot> slots_;
  int dimension_ = 0;
};

// Number in [0,1] for a numeric value; clamps outside the range.
double ToUnit(const Range& range, double value);
// Inverse of ToUnit with ints snapped to their lattice.
std::string FromUnit(const ParameterSpec& parameter, double unit);

// Seed for all randomness of one suggestion. `random_state` defaults to a
// hash of the experiment name when unset.
std::uint64_t RandomState(const ExperimentSpec& spec);

bool ContainsAssignment(const std::vector<AssignmentSet>& sets, const AssignmentSet& candidate);

// Draws a fresh random assignment for suggestion `index`, resampling up to
// ten times to avoid anything in `taken`.
AssignmentSet SampleDistinct(const ExperimentSpec& spec, std::uint64_t index,
                             const std::vector<AssignmentSet>& taken);

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_SEARCH_SPACE_H_
