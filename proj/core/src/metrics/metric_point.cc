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

#include "tunectl/metrics/metric_point.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace tunectl::metrics {

bool ObservationFilter::Matches(const MetricPoint& point) const {
  if (start_timestamp && point.timestamp < *start_timestamp) return false;
  if (end_timestamp && point.timestamp > *end_timestamp) return false;
  if (metric_names && std::find(metric_names->begin(), metric_names->end(),
                                point.metric_name) == metric_names->end()) {
    return false;
  }
  return true;
}

absl::Status ObservationFilter::Validate() const {
  if (start_timestamp && end_timestamp && *start_timestamp > *end_timestamp) {
    return absl::InvalidArgumentError("filter start timestamp is after its end");
  }
  return absl::OkStatus();
}

absl::Status ValidatePoint(const MetricPoint& point) {
  if (point.trial_name.empty()) return absl::InvalidArgumentError("metric point has no trial");
  if (point.metric_name.empty()) return absl::InvalidArgumentError("metric name is empty");
  if (!std::isfinite(point.value)) {
    return absl::InvalidArgumentError(absl::StrCat("non-finite value for ", point.metric_name));
  }
  return absl::OkStatus();
}

void SortLog(std::vector<MetricPoint>& points) {
  std::stable_sort(points.begin(), points.end(), [](const MetricPoint& a, const MetricPoint& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.metric_name < b.metric_name;
  });
}

nlohmann::json ToJson(const MetricPoint& point) {
  return {{"trial", point.trial_name},
          {"metric", point.metric_name},
          {"ts", point.timestamp},
          {"value", point.value}};
}

absl::StatusOr<MetricPoint> PointFromJson(const nlohmann::json& json) {
  if (!json.is_object() || !json.contains("trial") || !json.contains("metric") ||
      !json.contains("ts") || !json.contains("value") || !json["trial"].is_string() ||
      !json["metric"].is_string() || !json["ts"].is_number_integer() ||
      !json["value"].is_number()) {
    return absl::InvalidArgumentError("metric record needs trial, metric, ts and value");
  }
  MetricPoint point{json["trial"].get<std::string>(), json["metric"].get<std::string>(),
                    json["ts"].get<std::int64_t>(), json["value"].get<double>()};
  if (absl::Status status = ValidatePoint(point); !status.ok()) return status;
  return point;
}

absl::Status CheckBatch(std::span<const MetricPoint> points) {
  if (points.empty()) return absl::InvalidArgumentError("no points to register");
  for (const auto& point : points) {
    if (absl::Status status = ValidatePoint(point); !status.ok()) return status;
    if (point.trial_name != points.front().trial_name) {
      return absl::InvalidArgumentError("a registration must target a single trial");
    }
  }
  return absl::OkStatus();
}

std::vector<MetricPoint> ObservationIndex::Insert(std::span<const MetricPoint> points) {
  std::vector<MetricPoint> added;
  for (const auto& point : points) {
    auto it = logs_.find(point.trial_name);
    if (it == logs_.end()) it = logs_.emplace(point.trial_name, TrialLog{}).first;
    if (!it->second.seen.emplace(point.metric_name, point.timestamp, point.value).second) continue;
    it->second.points.push_back(point);
    added.push_back(point);
  }
  return added;
}

std::vector<MetricPoint> ObservationIndex::Novel(std::span<const MetricPoint> points) const {
  std::vector<MetricPoint> novel;
  std::set<std::tuple<std::string, std::string, std::int64_t, double>> batch;
  for (const auto& point : points) {
    auto it = logs_.find(point.trial_name);
    if (it != logs_.end() &&
        it->second.seen.contains({point.metric_name, point.timestamp, point.value})) {
      continue;
    }
    if (!batch.emplace(point.trial_name, point.metric_name, point.timestamp, point.value).second) {
      continue;
    }
    novel.push_back(point);
  }
  return novel;
}

std::vector<MetricPoint> ObservationIndex::Query(std::string_view trial_name,
                                                 const ObservationFilter& filter) const {
  std::vector<MetricPoint> out;
  auto it = logs_.find(trial_name);
  if (it == logs_.end()) return out;
  for (const auto& point : it->second.points) {
    if (filter.Matches(point)) out.push_back(point);
  }
  SortLog(out);
  return out;
}

void ObservationIndex::Erase(std::string_view trial_name) {
  if (auto it = logs_.find(trial_name); it != logs_.end()) logs_.erase(it);
}

std::vector<MetricPoint> ObservationIndex::All() const {
  std::vector<MetricPoint> out;
  for (const auto& [name, log] : logs_) out.insert(out.end(), log.points.begin(), log.points.end());
  return out;
}

}  // namespace tunectl::metrics
