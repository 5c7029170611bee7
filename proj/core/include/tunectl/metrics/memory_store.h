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

#ifndef TUNECTL_METRICS_MEMORY_STORE_H_
#define TUNECTL_METRICS_MEMORY_STORE_H_

#include <mutex>

#include "tunectl/metrics/metric_point.h"

namespace tunectl::metrics {

class MemoryObservationStore : public ObservationStore {
 public:
  absl::Status Register(std::span<const MetricPoint> points) override;
  absl::StatusOr<std::vector<MetricPoint>> Get(std::string_view trial_name,
                                               const ObservationFilter& filter) override;
  absl::Status Delete(std::string_view trial_name) override;

 private:
  std::mutex mu_;
  ObservationIndex index_;
};

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_MEMORY_STORE_H_
