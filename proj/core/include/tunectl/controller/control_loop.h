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

#ifndef TUNECTL_CONTROLLER_CONTROL_LOOP_H_
#define TUNECTL_CONTROLLER_CONTROL_LOOP_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

#include "absl/status/statusor.h"
#include "tunectl/controller/controllers.h"

namespace tunectl::controller {

// Drives the three controllers over a store. One pass reconciles every
// trial, then every experiment, then every suggestion, each in key order.
class ControlLoop {
 public:
  ControlLoop(ResourceStore* store, ControllerContext context)
      : store_(store), context_(context) {}

  // Repeats passes until one commits nothing. `stop` is polled before every
  // reconcile; returns false if it fired, true at the fixed point.
  absl::StatusOr<bool> Step(const std::function<bool()>& stop = {});

  // Every experiment is terminal and none of its trials is still active.
  bool Finished() const;

  // Steps every `poll` interval until Finished() or `stop` fires.
  absl::Status Run(std::chrono::milliseconds poll, const std::function<bool()>& stop = {});

  std::uint64_t reconcile_count() const { return reconcile_count_; }

 private:
  ResourceStore* store_;
  ControllerContext context_;
  std::uint64_t reconcile_count_ = 0;
};

// Stores a validated experiment in phase Created. AlreadyExists when the
// namespace already holds an experiment of that name.
absl::Status SubmitExperiment(ResourceStore& store, const ExperimentSpec& spec);

}  // namespace tunectl::controller

#endif  // TUNECTL_CONTROLLER_CONTROL_LOOP_H_
