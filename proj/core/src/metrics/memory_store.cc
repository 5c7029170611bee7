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

#include "tunectl/metrics/memory_store.h"

namespace tunectl::metrics {

absl::Status MemoryObservationStore::Register(std::span<const MetricPoint> points) {
  if (absl::Status status = CheckBatch(points); !status.ok()) return status;
  std::lock_guard lock(mu_);
  index_.Insert(points);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<MetricPoint>> MemoryObservationStore::Get(
    std::string_view trial_name, const ObservationFilter& filter) {
  if (absl::Status status = filter.Validate(); !status.ok()) return status;
  std::lock_guard lock(mu_);
  return index_.Query(trial_name, filter);
}

absl::Status MemoryObservationStore::Delete(std::string_view trial_name) {
  std::lock_guard lock(mu_);
  index_.Erase(trial_name);
  return absl::OkStatus();
}

}  // namespace tunectl::metrics
