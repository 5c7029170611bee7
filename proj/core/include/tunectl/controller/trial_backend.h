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

#ifndef TUNECTL_CONTROLLER_TRIAL_BACKEND_H_
#define TUNECTL_CONTROLLER_TRIAL_BACKEND_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "tunectl/model/experiment.h"

namespace tunectl::controller {

enum class JobPhase { kUnknown, kPending, kRunning, kSucceeded, kTemporaryFailure, kPermanentFailure };

struct JobRequest {
  TrialRunSpec run_spec;
  int worker_count = 1;
  double cpu_per_worker = 1.0;
  MetricCollectorKind collector = MetricCollectorKind::kPull;
  // Objective metric first, then additional metrics.
  std::vector<std::string> watched_metrics;
};

struct JobStatus {
  JobPhase phase = JobPhase::kUnknown;
  // 0 for the first run, incremented by each Restart.
  int attempt = 0;
  std::string reason;
};

// Where trial jobs run. Every call is idempotent so a restarted controller
// can repeat any of them.
class TrialBackend {
 public:
  virtual ~TrialBackend() = default;

  // Creates the job unless one with the same name exists.
  virtual absl::Status Submit(const JobRequest& request) = 0;
  // kUnknown for a name never submitted.
  virtual JobStatus Status(std::string_view trial_name) const = 0;
  // Reruns a temporarily failed job as `attempt`, keeping checkpointed
  // progress. No-op if the job is already at `attempt` or later.
  virtual absl::Status Restart(std::string_view trial_name, int attempt) = 0;

  // The per-experiment suggestion service.
  virtual absl::Status EnsureAlgorithmService(std::string_view ns, std::string_view experiment) = 0;
  virtual bool AlgorithmServiceReady(std::string_view ns, std::string_view experiment) const = 0;
  virtual void ReleaseAlgorithmService(std::string_view ns, std::string_view experiment) = 0;

  // Monotone clock used for finish times and retry backoff.
  virtual std::int64_t Now() const = 0;
};

}  // namespace tunectl::controller

#endif  // TUNECTL_CONTROLLER_TRIAL_BACKEND_H_
