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

#ifndef TUNECTL_SIM_OBJECTIVES_H_
#define TUNECTL_SIM_OBJECTIVES_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"

namespace tunectl::sim {

// Metric value after training fraction `progress` in [0,1]. `noise_seed`
// drives the Gaussian noise scaled by descriptor.noise_stddev.
//   sphere, rosenbrock: f(x) + (1 - progress), minimized; every numeric
//     assignment except `budget` is a coordinate.
//   mnist-surrogate: pseudo-accuracy from lr, num-layers, batch-size and
//     optimizer, scaled by (0.5 + 0.5 * progress).
absl::StatusOr<double> EvalSimObjective(const SimObjectiveDescriptor& descriptor,
                                        const AssignmentSet& assignments, double progress,
                                        std::uint64_t noise_seed);

// Noise-free surrogate accuracy at full training.
double MnistSurrogateAccuracy(double lr, double layers, double batch, std::string_view optimizer);

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_OBJECTIVES_H_
