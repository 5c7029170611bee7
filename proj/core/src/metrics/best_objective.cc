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

#include "tunectl/metrics/best_objective.h"

#include <algorithm>

namespace tunectl::metrics {

std::optional<double> LatestValue(const std::vector<MetricPoint>& points, std::string_view metric) {
  std::vector<MetricPoint> series;
  for (const auto& point : points) {
    if (point.metric_name == metric) series.push_back(point);
  }
  if (series.empty()) return std::nullopt;
  SortLog(series);
  return series.back().value;
}

std::optional<double> BestObjective(const std::vector<MetricPoint>& points,
                                    const ObjectiveSpec& objective) {
  if (objective.metric_strategy == MetricStrategy::kLatest) {
    return LatestValue(points, objective.objective_metric_name);
  }
  std::optional<double> best;
  for (const auto& point : points) {
    if (point.metric_name != objective.objective_metric_name) continue;
    if (!best) {
      best = point.value;
    } else if (objective.metric_strategy == MetricStrategy::kMax) {
      best = std::max(*best, point.value);
    } else {
      best = std::min(*best, point.value);
    }
  }
  return best;
}

}  // namespace tunectl::metrics
