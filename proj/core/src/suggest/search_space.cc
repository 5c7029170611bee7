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

#include "tunectl/suggest/search_space.h"

#include <algorithm>
#include <cmath>

#include "tunectl/common/numeric_format.h"

namespace tunectl::suggest {
namespace {

constexpr int kMaxResampleAttempts = 10;

double IntStep(const Range& range) { return range.step.value_or(1.0); }

std::string FormatInt(double value) {
  return std::to_string(static_cast<std::int64_t>(std::llround(value)));
}

}  // namespace

std::int64_t IntLatticeSize(const Range& range) {
  const double step = IntStep(range);
  return static_cast<std::int64_t>(std::floor((range.max - range.min) / step + 1e-9)) + 1;
}

std::string SampleValue(const ParameterSpec& parameter, Rng& rng) {
  if (const auto* list = parameter.list()) return list->values[rng.Index(list->values.size())];
  const Range& range = *parameter.range();
  if (parameter.type == ParameterType::kInt) {
    const std::int64_t k = rng.UniformInt(0, IntLatticeSize(range) - 1);
    return FormatInt(range.min + static_cast<double>(k) * IntStep(range));
  }
  return FormatDouble(rng.Uniform(range.min, range.max));
}

AssignmentSet SampleAssignment(const std::vector<ParameterSpec>& parameters, Rng& rng) {
  AssignmentSet out;
  out.reserve(parameters.size());
  for (const auto& parameter : parameters) {
    out.push_back({parameter.name, SampleValue(parameter, rng)});
  }
  return out;
}

bool IsFeasible(const ParameterSpec& parameter, std::string_view value) {
  if (const auto* list = parameter.list()) {
    return std::find(list->values.begin(), list->values.end(), value) != list->values.end();
  }
  const Range& range = *parameter.range();
  if (parameter.type == ParameterType::kInt) {
    auto number = ParseInt(value);
    if (!number) return false;
    const double v = static_cast<double>(*number);
    if (v < range.min || v > range.max) return false;
    const double k = (v - range.min) / IntStep(range);
    return std::abs(k - std::round(k)) < 1e-9;
  }
  auto number = ParseDouble(value);
  return number && std::isfinite(*number) && *number >= range.min && *number <= range.max;
}

bool IsFeasible(const std::vector<ParameterSpec>& parameters, const AssignmentSet& assignments,
                const std::vector<std::string>& allowed_extra) {
  if (assignments.size() < parameters.size()) return false;
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    if (assignments[i].name != parameters[i].name) return false;
    if (!IsFeasible(parameters[i], assignments[i].value)) return false;
  }
  for (std::size_t i = parameters.size(); i < assignments.size(); ++i) {
    if (std::find(allowed_extra.begin(), allowed_extra.end(), assignments[i].name) ==
        allowed_extra.end()) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> GridValues(const ParameterSpec& parameter) {
  if (const auto* list = parameter.list()) return list->values;
  const Range& range = *parameter.range();
  std::vector<std::string> out;
  if (parameter.type == ParameterType::kInt) {
    const std::int64_t n = IntLatticeSize(range);
    for (std::int64_t k = 0; k < n; ++k) {
      out.push_back(FormatInt(range.min + static_cast<double>(k) * IntStep(range)));
    }
    return out;
  }
  const double step = *range.step;
  const auto n = static_cast<std::int64_t>(std::floor((range.max - range.min) / step + 1e-9));
  for (std::int64_t k = 0; k <= n; ++k) {
    out.push_back(FormatLatticeValue(std::min(range.max, range.min + static_cast<double>(k) * step)));
  }
  return out;
}

double ToUnit(const Range& range, double value) {
  return std::clamp((value - range.min) / (range.max - range.min), 0.0, 1.0);
}

std::string FromUnit(const ParameterSpec& parameter, double unit) {
  const Range& range = *parameter.range();
  const double u = std::clamp(unit, 0.0, 1.0);
  if (parameter.type == ParameterType::kInt) {
    const double step = IntStep(range);
    const std::int64_t last = IntLatticeSize(range) - 1;
    const auto k = std::clamp<std::int64_t>(
        std::llround(u * (range.max - range.min) / step), 0, last);
    return FormatInt(range.min + static_cast<double>(k) * step);
  }
  return FormatDouble(std::clamp(range.min + u * (range.max - range.min), range.min, range.max));
}

UnitEncoder::UnitEncoder(const std::vector<ParameterSpec>& parameters) {
  for (const auto& parameter : parameters) {
    const int width =
        parameter.list() ? static_cast<int>(parameter.list()->values.size()) : 1;
    slots_.push_back({&parameter, dimension_, width});
    dimension_ += width;
  }
}

std::vector<double> UnitEncoder::Encode(const AssignmentSet& assignments) const {
  std::vector<double> point(static_cast<std::size_t>(dimension_), 0.0);
  for (const Slot& slot : slots_) {
    const ParameterAssignment* assignment = FindAssignment(assignments, slot.parameter->name);
    if (assignment == nullptr) continue;
    if (const auto* list = slot.parameter->list()) {
      auto it = std::find(list->values.begin(), list->values.end(), assignment->value);
      if (it != list->values.end()) point[slot.offset + (it - list->values.begin())] = 1.0;
    } else if (auto value = ParseDouble(assignment->value)) {
      point[slot.offset] = ToUnit(*slot.parameter->range(), *value);
    }
  }
  return point;
}

AssignmentSet UnitEncoder::Decode(const std::vector<double>& point) const {
  AssignmentSet out;
  for (const Slot& slot : slots_) {
    if (const auto* list = slot.parameter->list()) {
      int best = 0;
      for (int j = 1; j < slot.width; ++j) {
        if (point[slot.offset + j] > point[slot.offset + best]) best = j;
      }
      out.push_back({slot.parameter->name, list->values[best]});
    } else {
      out.push_back({slot.parameter->name, FromUnit(*slot.parameter, point[slot.offset])});
    }
  }
  return out;
}

std::uint64_t RandomState(const ExperimentSpec& spec) {
  if (auto it = spec.algorithm.settings.find("random_state");
      it != spec.algorithm.settings.end()) {
    if (auto value = ParseInt(it->second)) return static_cast<std::uint64_t>(*value);
  }
  return HashString(spec.namespace_name + "/" + spec.name);
}

bool ContainsAssignment(const std::vector<AssignmentSet>& sets, const AssignmentSet& candidate) {
  return std::find(sets.begin(), sets.end(), candidate) != sets.end();
}

AssignmentSet SampleDistinct(const ExperimentSpec& spec, std::uint64_t index,
                             const std::vector<AssignmentSet>& taken) {
  const std::uint64_t state = RandomState(spec);
  AssignmentSet candidate;
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    Rng rng(DeriveSeed(state, "sample", index, attempt));
    candidate = SampleAssignment(spec.parameters, rng);
    if (!ContainsAssignment(taken, candidate)) break;
  }
  return candidate;
}

}  // namespace tunectl::suggest
