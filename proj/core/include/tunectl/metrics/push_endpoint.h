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

#ifndef TUNECTL_METRICS_PUSH_ENDPOINT_H_
#define TUNECTL_METRICS_PUSH_ENDPOINT_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tunectl/metrics/metric_point.h"

namespace tunectl::metrics {

// Unix-domain stream socket accepting metric lines for one trial. Each line
// is parsed like pulled output, registered, and answered with "ack\n" once
// visible to readers ("err <reason>\n" if the store refused it).
class PushEndpoint {
 public:
  static absl::StatusOr<std::unique_ptr<PushEndpoint>> Start(std::filesystem::path socket_path,
                                                            std::string trial_name,
                                                            std::vector<std::string> watched,
                                                            ObservationStore* store);
  ~PushEndpoint();

  PushEndpoint(const PushEndpoint&) = delete;
  PushEndpoint& operator=(const PushEndpoint&) = delete;

  const std::filesystem::path& path() const { return path_; }
  int malformed_lines() const { return malformed_.load(); }

 private:
  PushEndpoint() = default;
  void Serve();
  void ServeConnection(int fd);
  void HandleLine(int fd, std::string_view line);

  std::filesystem::path path_;
  std::string trial_name_;
  std::vector<std::string> watched_;
  ObservationStore* store_ = nullptr;
  int listen_fd_ = -1;
  int wake_pipe_[2] = {-1, -1};
  std::atomic<int> malformed_{0};
  std::thread thread_;
};

// Sends `lines` one at a time, waiting for each acknowledgement.
absl::Status PushMetricLines(const std::filesystem::path& socket_path, std::string_view lines);

}  // namespace tunectl::metrics

#endif  // TUNECTL_METRICS_PUSH_ENDPOINT_H_
