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

#ifndef TUNECTL_SIM_SIM_BACKEND_H_
#define TUNECTL_SIM_SIM_BACKEND_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "tunectl/controller/trial_backend.h"
#include "tunectl/metrics/metric_point.h"
#include "tunectl/sim/cluster.h"

namespace tunectl::sim {

// Runs trial jobs and algorithm services as workloads of a simulated
// cluster. Time is the cluster tick.
class SimBackend : public controller::TrialBackend {
 public:
  SimBackend(Cluster* cluster, EventLog* log, double service_cpu)
      : cluster_(cluster), log_(log), service_cpu_(service_cpu) {}

  absl::Status Submit(const controller::JobRequest& request) override;
  controller::JobStatus Status(std::string_view trial_name) const override;
  absl::Status Restart(std::string_view trial_name, int attempt) override;
  absl::Status EnsureAlgorithmService(std::string_view ns, std::string_view experiment) override;
  bool AlgorithmServiceReady(std::string_view ns, std::string_view experiment) const override;
  void ReleaseAlgorithmService(std::string_view ns, std::string_view experiment) override;
  std::int64_t Now() const override { return cluster_->tick(); }

  void set_cluster(Cluster* cluster) { cluster_ = cluster; }

 private:
  Cluster* cluster_;
  EventLog* log_;
  double service_cpu_;
};

// Workload name of an experiment's algorithm service.
std::string ServiceName(std::string_view ns, std::string_view experiment);

// Moves every running trial forward one tick and records its metrics at the
// current tick, through text lines for pull collection or as points for
// push. Trials reaching their duration succeed and free their capacity.
void AdvanceTrials(Cluster& cluster, metrics::ObservationStore& store, std::uint64_t seed,
                   EventLog& log);

}  // namespace tunectl::sim

#endif  // TUNECTL_SIM_SIM_BACKEND_H_
