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

#ifndef TUNECTL_TOOLS_CLI_COMMANDS_H_
#define TUNECTL_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace tunectl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitValidation = 2,
  kExitConflict = 3,
  kExitRuntime = 4,
  kExitScenarioFailed = 5,
};

// InvalidArgument maps to validation, AlreadyExists/Aborted/FailedPrecondition
// to conflict, anything else to runtime.
int ExitCodeFor(const absl::Status& status);

// Store layout under one directory.
struct StorePaths {
  std::filesystem::path root;
  std::filesystem::path resources() const { return root / "resources"; }
  std::filesystem::path metrics() const { return root / "metrics.jsonl"; }
  std::filesystem::path world() const { return root / "world.json"; }
  std::filesystem::path work() const { return root / "work"; }
};

// Validates and stores the experiment; returns its key.
absl::StatusOr<std::string> SubmitFile(const std::filesystem::path& file, const StorePaths& store);

enum class Backend { kSim, kLocal };

struct RunOptions {
  StorePaths store;
  Backend backend = Backend::kSim;
  std::optional<std::filesystem::path> scenario;
  std::uint64_t seed = 1;
  // Sim only: ticks to simulate in this invocation before saving state.
  std::optional<std::int64_t> max_ticks;
  // Local only: exit code a trial uses to request a restart.
  int temporary_failure_exit_code = 75;
  std::function<bool()> stop;
};

// Drives the control loop until every experiment finishes, the tick budget
// runs out or `stop` fires, then writes the summary to `out`.
absl::Status Run(const RunOptions& options, std::ostream& out);

// Phase, trial counts and current optimum of every stored experiment.
absl::StatusOr<std::string> Summary(const StorePaths& store);

enum class ExportFormat { kCsv, kJsonl };

// One row per spawned trial in index order. Columns: trial, parameters in
// declaration order (plus budget for hyperband), objective, additional
// metrics, phase, restartCount.
absl::StatusOr<std::string> ExportResults(const StorePaths& store, const std::string& ns,
                                          const std::string& experiment, ExportFormat format);

// Full command-line entry point. Returns the process exit code.
int Main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
         const std::function<bool()>& stop = {});

}  // namespace tunectl::cli

#endif  // TUNECTL_TOOLS_CLI_COMMANDS_H_
