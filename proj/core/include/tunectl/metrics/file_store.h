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

#ifndef TUNECTL_METRICS_FILE_STORE_H_
#define TUNECTL_METRICS_FILE_STORE_H_

#include <cstdio>
#include <filesystem>
#include <memory>
#include <mutex>

#include "tunectl/metrics/metric_point.h"

namespace tunectl::metrics {

// Append-only JSON-lines log, one {trial, metric, ts, value} object per line.
// Reads are served from an index rebuilt at Open. Delete rewrites the file
// through a temporary and an atomic rename.
class FileObservationStore : public ObservationStore {
 public:
  // Creates the file if missing. A torn final line from a crash is skipped.
  static absl::StatusOr<std::unique_ptr<FileObservationStore>> Open(std::filesystem::path path);
  ~FileObservationStore() override;

  absl::Status Register(std::span<const MetricPoint> points) override;
  absl::StatusOr<std::vector<MetricPoint>> Get(std::string_view trial_name,
                                               const ObservationFilter& filter) override;
  absl::Status Delete(std::string_view trial_name) override;

  const std::filesystem::path& path() const { return path_; }

 private:
  explicit FileObservationStore(std::filesystem::path path) : path_(std::move(path)) {}
  absl::Status OpenForAppend();

  std::mutex mu_;
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  ObservationIndex index_;
};

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_FILE_STORE_H_
