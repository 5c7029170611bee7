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

#ifndef TUNECTL_METRICS_BEST_OBJECTIVE_H_
#define TUNECTL_METRICS_BEST_OBJECTIVE_H_

#include <optional>
#include <string_view>
#include <vector>

#include "tunectl/metrics/metric_point.h"
#include "tunectl/model/experiment.h"

namespace tunectl::metrics {

// The trial's objective value under `objective.metric_strategy`: the latest
// report by default, or the max/min of the series. Absent without reports.
std::optional<double> BestObjective(const std::vector<MetricPoint>& points,
                                    const ObjectiveSpec& objective);

// Latest value of `metric`, if reported.
std::optional<double> LatestValue(const std::vector<MetricPoint>& points, std::string_view metric);

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_BEST_OBJECTIVE_H_
