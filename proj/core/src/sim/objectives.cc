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

#include "tunectl/sim/objectives.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "tunectl/common/numeric_format.h"
#include "tunectl/common/rng.h"

namespace tunectl::sim {
namespace {

struct OptimizerProfile {
  std::string_view name;
  double peak;
  double best_lr;
};

constexpr OptimizerProfile kOptimizers[] = {
    {"sgd", 0.985, 0.25},
    {"adam", 0.955, 0.05},
    {"ftrl", 0.93, 0.5},
};

std::vector<double> Coordinates(const AssignmentSet& assignments) {
  std::vector<double> x;
  for (const auto& a : assignments) {
    if (a.name == kBudgetParameter) continue;
    if (auto value = ParseDouble(a.value)) x.push_back(*value);
  }
  return x;
}

double Number(const AssignmentSet& assignments, std::initializer_list<std::string_view> names,
              double fallback) {
  for (std::string_view name : names) {
    if (const auto* a = FindAssignment(assignments, name)) {
      if (auto value = ParseDouble(a->value)) return *value;
    }
  }
  return fallback;
}

}  // namespace

double MnistSurrogateAccuracy(double lr, double layers, double batch, std::string_view optimizer) {
  const std::string lowered = absl::AsciiStrToLower(absl::string_view(optimizer.data(), optimizer.size()));
  const OptimizerProfile* profile = &kOptimizers[0];
  for (const auto& candidate : kOptimizers) {
    if (candidate.name == lowered) profile = &candidate;
  }
  const double batch_term = (batch - 900.0) / 1000.0;
  return profile->peak - 0.6 * (lr - profile->best_lr) * (lr - profile->best_lr) -
         0.004 * (layers - 4.0) * (layers - 4.0) - 0.02 * batch_term * batch_term;
}

absl::StatusOr<double> EvalSimObjective(const SimObjectiveDescriptor& descriptor,
                                        const AssignmentSet& assignments, double progress,
                                        std::uint64_t noise_seed) {
  const double p = std::clamp(progress, 0.0, 1.0);
  double value = 0.0;
  if (descriptor.function_name == "sphere") {
    for (double x : Coordinates(assignments)) value += x * x;
    value += 1.0 - p;
  } else if (descriptor.function_name == "rosenbrock") {
    const std::vector<double> x = Coordinates(assignments);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      value += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    }
    value += 1.0 - p;
  } else if (descriptor.function_name == "mnist-surrogate") {
    const auto* optimizer = FindAssignment(assignments, "optimizer");
    const double accuracy = MnistSurrogateAccuracy(
        Number(assignments, {"lr", "learning-rate"}, 0.25),
        Number(assignments, {"num-layers", "layers"}, 4.0),
        Number(assignments, {"batch-size", "batch"}, 900.0),
        optimizer != nullptr ? optimizer->value : "sgd");
    value = std::max(0.1, accuracy * (0.5 + 0.5 * p));
  } else {
    return absl::NotFoundError(absl::StrCat("unknown simulated function '",
                                            descriptor.function_name, "'"));
  }
  if (descriptor.noise_stddev > 0.0) {
    Rng rng(noise_seed);
    value += descriptor.noise_stddev * rng.Normal();
  }
  return value;
}

}  // namespace tunectl::sim
