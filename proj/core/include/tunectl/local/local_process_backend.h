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

#ifndef TUNECTL_LOCAL_LOCAL_PROCESS_BACKEND_H_
#define TUNECTL_LOCAL_LOCAL_PROCESS_BACKEND_H_

#include <sys/types.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tunectl/controller/trial_backend.h"
#include "tunectl/metrics/metric_point.h"
#include "tunectl/metrics/push_endpoint.h"

namespace tunectl::local {

// EX_TEMPFAIL from sysexits.h.
inline constexpr int kDefaultTemporaryFailureExitCode = 75;

struct LocalBackendOptions {
  // Holds per-trial stdout logs and push sockets.
  std::filesystem::path work_dir;
  metrics::ObservationStore* metrics = nullptr;
  int temporary_failure_exit_code = kDefaultTemporaryFailureExitCode;
};

// Runs each trial as `workerCount` host processes. The rendered command is
// split like a POSIX shell would and started with posix_spawnp, with
// TUNECTL_TRIAL_NAME, TUNECTL_WORKER_INDEX and TUNECTL_RESTART_COUNT set.
// Pull collection parses worker 0's stdout; push collection exposes a
// socket named by TUNECTL_METRICS_SOCKET. A job succeeds when every worker
// exits 0; the temporary-failure exit code from any worker makes it
// restartable, any other failure is permanent.
class LocalProcessBackend : public controller::TrialBackend {
 public:
  explicit LocalProcessBackend(LocalBackendOptions options);
  // Kills running workers and waits for the monitors.
  ~LocalProcessBackend() override;

  LocalProcessBackend(const LocalProcessBackend&) = delete;
  LocalProcessBackend& operator=(const LocalProcessBackend&) = delete;

  absl::Status Submit(const controller::JobRequest& request) override;
  controller::JobStatus Status(std::string_view trial_name) const override;
  absl::Status Restart(std::string_view trial_name, int attempt) override;
  // The algorithm service runs in-process, so it is ready immediately.
  absl::Status EnsureAlgorithmService(std::string_view ns, std::string_view experiment) override;
  bool AlgorithmServiceReady(std::string_view ns, std::string_view experiment) const override;
  void ReleaseAlgorithmService(std::string_view ns, std::string_view experiment) override;
  // Wall-clock seconds.
  std::int64_t Now() const override;

  // Blocks until no job is running.
  void WaitIdle() const;

 private:
  struct Job {
    controller::JobRequest request;
    controller::JobStatus status;
    std::vector<pid_t> pids;
    std::thread monitor;
  };

  // Starts the workers for the job's current attempt. Caller holds mu_.
  void Launch(Job& job);
  void Monitor(std::string trial_name, int attempt, std::vector<pid_t> pids, int stdout_fd,
               std::unique_ptr<metrics::PushEndpoint> endpoint);
  void Finish(const std::string& trial_name, int attempt, controller::JobPhase phase,
              std::string reason);

  LocalBackendOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Job>, std::less<>> jobs_;
  std::set<std::string, std::less<>> services_;
  std::vector<std::thread> retired_monitors_;
};

}  // namespace tunectl::local

#endif  // TUNECTL_LOCAL_LOCAL_PROCESS_BACKEND_H_
