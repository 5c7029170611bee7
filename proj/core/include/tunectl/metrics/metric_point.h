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

#ifndef TUNECTL_METRICS_METRIC_POINT_H_
#define TUNECTL_METRICS_METRIC_POINT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "absl/status/statusor.h"

namespace tunectl::metrics {

struct MetricPoint {
  std::string trial_name;
  std::string metric_name;
  // Simulator tick or wall-clock milliseconds; opaque to the store.
  std::int64_t timestamp = 0;
  double value = 0.0;

  bool operator==(const MetricPoint&) const = default;
};

// Both bounds are inclusive.
struct ObservationFilter {
  std::optional<std::int64_t> start_timestamp;
  std::optional<std::int64_t> end_timestamp;
  std::optional<std::vector<std::string>> metric_names;

  bool Matches(const MetricPoint& point) const;
  absl::Status Validate() const;
};

absl::Status ValidatePoint(const MetricPoint& point);

// Stable ascending sort by (timestamp, metric name).
void SortLog(std::vector<MetricPoint>& points);

nlohmann::json ToJson(const MetricPoint& point);
absl::StatusOr<MetricPoint> PointFromJson(const nlohmann::json& json);

// Storage behind the register/get/delete calls. Implementations are safe for
// concurrent use.
class ObservationStore {
 public:
  virtual ~ObservationStore() = default;

  // All points must belong to one trial. Exact duplicates of stored points
  // are dropped. Unavailable signals a retryable backend failure.
  virtual absl::Status Register(std::span<const MetricPoint> points) = 0;
  // Ordered per SortLog; empty for an unknown trial.
  virtual absl::StatusOr<std::vector<MetricPoint>> Get(std::string_view trial_name,
                                                       const ObservationFilter& filter) = 0;
  // No-op for an unknown trial.
  virtual absl::Status Delete(std::string_view trial_name) = 0;
};

// Validates a Register call: non-empty, one trial, valid points.
absl::Status CheckBatch(std::span<const MetricPoint> points);

// Per-trial logs in insertion order with duplicate suppression. Not
// synchronized; the stores wrap it with a mutex.
class ObservationIndex {
 public:
  // Returns the points that were not already present.
  std::vector<MetricPoint> Insert(std::span<const MetricPoint> points);
  // The points Insert would add, without modifying the index.
  std::vector<MetricPoint> Novel(std::span<const MetricPoint> points) const;
  std::vector<MetricPoint> Query(std::string_view trial_name,
                                 const ObservationFilter& filter) const;
  void Erase(std::string_view trial_name);
  // Every stored point, grouped by trial in name order.
  std::vector<MetricPoint> All() const;

 private:
  struct TrialLog {
    std::vector<MetricPoint> points;
    std::set<std::tuple<std::string, std::int64_t, double>> seen;
  };
  std::map<std::string, TrialLog, std::less<>> logs_;
};

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_METRIC_POINT_H_
