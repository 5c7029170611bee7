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

// Randomized property checks run both as unit tests and by the acceptance
// binary. Each returns a verdict plus a one-line account of what it saw.

#ifndef TUNECTL_TESTS_SUPPORT_PROPERTY_CHECKS_H_
#define TUNECTL_TESTS_SUPPORT_PROPERTY_CHECKS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "tunectl/model/experiment.h"
#include "tunectl/suggest/algorithm.h"
#include "tunectl/suggest/hyperband.h"

namespace tunectl::testing {

struct CheckResult {
  bool passed = false;
  std::string detail;
};

struct DriveOptions {
  // Stop after this many suggestions, or earlier on exhaustion.
  int max_suggestions = 25;
  // Issue each batch as a series of single-suggestion calls.
  bool split_batches = false;
  // Seeds batch sizes and synthetic outcomes.
  std::uint64_t salt = 0;
};

struct DriveRecord {
  std::vector<AssignmentSet> suggestions;
  // Algorithm state after every call, in order.
  std::vector<std::string> states;
  bool exhausted = false;
};

// Plays an experiment against the suggestion algorithm: batches of one to
// three suggestions, each batch completed with SyntheticOutcome before the
// next is requested.
absl::StatusOr<DriveRecord> DriveAlgorithm(const ExperimentSpec& spec,
                                           const suggest::AlgorithmRegistry& registry,
                                           const DriveOptions& options);

// Every suggestion of every algorithm lies in its feasible space.
CheckResult CheckSuggestionFeasibility(int cases, std::uint64_t seed);

// Repeating a run reproduces it byte for byte, and splitting batches into
// single calls does not change the suggestions.
CheckResult CheckSuggestionDeterminism(int cases, std::uint64_t seed);

// Grid batches until exhaustion enumerate the cross product exactly once,
// in declaration-order lexicographic order.
CheckResult CheckGridCompleteness(int cases, std::uint64_t seed);

// Best noise-free value of a sequential run on the sphere in [-5, 5]^dims.
double SphereBestOfRun(std::string_view algorithm, std::uint64_t random_state, int dimensions,
                       int trials);

// Median best over `seeds` paired runs of random, bayesianoptimization and
// tpe; passes when both model-based medians are at most random's.
CheckResult CheckSphereDominance(int seeds, int trials);

// Successive-halving table computed from the published recurrence.
std::vector<std::vector<suggest::HyperbandRung>> OracleHyperbandTable(std::int64_t max_resource,
                                                                       std::int64_t eta);
CheckResult CheckHyperbandTable(std::int64_t max_resource, std::int64_t eta);

// Memory and file observation stores answer identical random call
// sequences identically, including after the file store is reopened.
CheckResult CheckStorageDifferential(int sequences, std::uint64_t seed,
                                     const std::filesystem::path& dir);

// Streams delivered through the push socket and through pull parsing yield
// bit-identical best objectives under every strategy.
CheckResult CheckPushPullEquivalence(int streams, std::uint64_t seed,
                                     const std::filesystem::path& dir);

// Kills the control loop after a random number of reconciles, reopens the
// persisted store and finishes; terminal phases, optima and trial phase
// multisets must match an uninterrupted run.
CheckResult CheckRecoveryEquivalence(int kill_points, std::uint64_t seed,
                                     const std::filesystem::path& dir);

}  // namespace tunectl::testing

#endif  // TUNECTL_TESTS_SUPPORT_PROPERTY_CHECKS_H_
