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

#include <chrono>
#include <string>
#include <thread>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "tunectl/controller/control_loop.h"
#include "tunectl/local/local_process_backend.h"
#include "tunectl/metrics/memory_store.h"
#include "tunectl/model/experiment_yaml.h"
#include "tunectl/suggest/algorithm.h"
#include "test_support.h"

namespace tunectl::local {
namespace {

using controller::JobPhase;
using controller::JobRequest;
using ::testing::HasSubstr;
using ::testing::IsEmpty;

class LocalBackendTest : public ::testing::Test {
 protected:
  LocalBackendTest() : backend_({dir_.path() / "work", &metrics_}) {}

  JobRequest Request(const std::string& name, const std::string& command, int workers = 1) {
    JobRequest request;
    request.run_spec.trial_name = name;
    request.run_spec.namespace_name = "default";
    request.run_spec.resolved_payload = command;
    request.worker_count = workers;
    request.watched_metrics = {"accuracy"};
    return request;
  }
  std::string Script(const std::string& name, const std::string& body) {
    const auto path = dir_.path() / name;
    testing::WriteFile(path, "#!/bin/sh\n" + body);
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path.string();
  }
  controller::JobStatus WaitDone(const std::string& name) {
    backend_.WaitIdle();
    return backend_.Status(name);
  }

  testing::TempDir dir_;
  metrics::MemoryObservationStore metrics_;
  LocalProcessBackend backend_;
};

TEST_F(LocalBackendTest, StdoutMetricsAreCollected) {
  ASSERT_TRUE(backend_.Submit(Request("t-ok", Script("ok.sh", "echo 1 accuracy=0.9\n"))).ok());
  EXPECT_EQ(WaitDone("t-ok").phase, JobPhase::kSucceeded);
  auto points = metrics_.Get("t-ok", {});
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 1u);
  EXPECT_EQ((*points)[0].value, 0.9);
  EXPECT_EQ((*points)[0].timestamp, 1);
}

TEST_F(LocalBackendTest, UnwatchedMetricsAndProseAreIgnored) {
  ASSERT_TRUE(backend_
                  .Submit(Request("t-mixed", Script("mixed.sh",
                                                    "echo epoch 1 done\n"
                                                    "echo 2 loss=0.3\n"
                                                    "printf '3 accuracy=0.5'\n")))
                  .ok());
  EXPECT_EQ(WaitDone("t-mixed").phase, JobPhase::kSucceeded);
  auto points = metrics_.Get("t-mixed", {});
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 1u);
  EXPECT_EQ((*points)[0].metric_name, "accuracy");
  EXPECT_EQ((*points)[0].value, 0.5);
}

TEST_F(LocalBackendTest, TemporaryExitCodeAllowsRestart) {
  const std::string script = Script(
      "flaky.sh", "if [ \"$TUNECTL_RESTART_COUNT\" = 0 ]; then exit 75; fi\necho 1 accuracy=0.7\n");
  ASSERT_TRUE(backend_.Submit(Request("t-flaky", script)).ok());
  controller::JobStatus status = WaitDone("t-flaky");
  EXPECT_EQ(status.phase, JobPhase::kTemporaryFailure);
  EXPECT_EQ(status.reason, "worker 0 exited with code 75");
  ASSERT_TRUE(backend_.Restart("t-flaky", 1).ok());
  status = WaitDone("t-flaky");
  EXPECT_EQ(status.phase, JobPhase::kSucceeded);
  EXPECT_EQ(status.attempt, 1);
  // A stale restart request is ignored.
  ASSERT_TRUE(backend_.Restart("t-flaky", 1).ok());
  EXPECT_EQ(backend_.Status("t-flaky").phase, JobPhase::kSucceeded);
}

TEST_F(LocalBackendTest, OtherExitCodesArePermanent) {
  ASSERT_TRUE(backend_.Submit(Request("t-bad", Script("bad.sh", "exit 3\n"))).ok());
  const controller::JobStatus status = WaitDone("t-bad");
  EXPECT_EQ(status.phase, JobPhase::kPermanentFailure);
  EXPECT_THAT(status.reason, HasSubstr("code 3"));
}

TEST_F(LocalBackendTest, MissingProgramIsPermanent) {
  ASSERT_TRUE(backend_.Submit(Request("t-missing", "/nonexistent/trainer --lr=1")).ok());
  EXPECT_EQ(WaitDone("t-missing").phase, JobPhase::kPermanentFailure);
}

TEST_F(LocalBackendTest, SimulatedPayloadIsRejected) {
  JobRequest request = Request("t-sim", "");
  request.run_spec.resolved_payload = SimObjectiveDescriptor{"sphere", 1, 0.0, 0};
  ASSERT_TRUE(backend_.Submit(request).ok());
  const controller::JobStatus status = backend_.Status("t-sim");
  EXPECT_EQ(status.phase, JobPhase::kPermanentFailure);
  EXPECT_THAT(status.reason, HasSubstr("simulated"));
}

TEST_F(LocalBackendTest, AnyFailingWorkerFailsTheJob) {
  const std::string script = Script(
      "gang.sh", "if [ \"$TUNECTL_WORKER_INDEX\" = 1 ]; then exit 9; fi\nsleep 30\n");
  const auto start = std::chrono::steady_clock::now();
  ASSERT_TRUE(backend_.Submit(Request("t-gang", script, 2)).ok());
  const controller::JobStatus status = WaitDone("t-gang");
  EXPECT_EQ(status.phase, JobPhase::kPermanentFailure);
  EXPECT_EQ(status.reason, "worker 1 exited with code 9");
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(20));
}

TEST_F(LocalBackendTest, PushSocketIsAdvertisedToTheTrial) {
  const std::string script = Script("push.sh",
                                    "exec python3 - <<'EOF'\n"
                                    "import os, socket\n"
                                    "s = socket.socket(socket.AF_UNIX)\n"
                                    "s.connect(os.environ['TUNECTL_METRICS_SOCKET'])\n"
                                    "s.sendall(b'4 accuracy=0.875\\n')\n"
                                    "assert s.makefile().readline() == 'ack\\n'\n"
                                    "EOF\n");
  JobRequest request = Request("t-push", script);
  request.collector = MetricCollectorKind::kPush;
  ASSERT_TRUE(backend_.Submit(request).ok());
  EXPECT_EQ(WaitDone("t-push").phase, JobPhase::kSucceeded);
  auto points = metrics_.Get("t-push", {});
  ASSERT_TRUE(points.ok());
  ASSERT_EQ(points->size(), 1u);
  EXPECT_EQ((*points)[0].value, 0.875);
  EXPECT_EQ((*points)[0].timestamp, 4);
}

// A complete experiment through the controllers with real processes.
TEST_F(LocalBackendTest, ExperimentRunsEndToEnd) {
  const std::string script = Script("train.sh", "echo \"1 loss=$2\"\n");
  auto spec = ParseExperiment(absl::StrCat(R"(name: local-grid
objective:
  type: minimize
  objectiveMetricName: loss
algorithm:
  algorithmName: grid
parallelTrialCount: 2
maxTrialCount: 3
parameters:
  - name: x
    parameterType: int
    feasibleSpace: {min: "1", max: "3"}
trialTemplate:
  kind: local-process
  command: ")",
                                            script, R"( --x ${x}"
)"));
  ASSERT_TRUE(spec.ok()) << spec.status();
  auto store = controller::ResourceStore::InMemory();
  ASSERT_TRUE(controller::SubmitExperiment(*store, *spec).ok());
  controller::ControlLoop loop(store.get(), {&suggest::AlgorithmRegistry::Builtin(), &metrics_,
                                             &backend_});
  ASSERT_TRUE(loop.Run(std::chrono::milliseconds(20)).ok());
  auto experiment = controller::GetAs<controller::ExperimentResource>(
      *store, controller::ExperimentKey("default", "local-grid"));
  ASSERT_TRUE(experiment.has_value());
  const controller::ExperimentStatus& status = experiment->first.status;
  EXPECT_EQ(status.phase, controller::ExperimentPhase::kSucceeded);
  EXPECT_EQ(status.trials_succeeded, 3);
  ASSERT_TRUE(status.current_optimal.has_value());
  EXPECT_EQ(status.current_optimal->objective_value, 1.0);
  EXPECT_EQ(status.current_optimal->trial_name, "local-grid-0000");
}

}  // namespace
}  // namespace tunectl::local
