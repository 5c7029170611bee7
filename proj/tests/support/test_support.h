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

// Fixtures shared by the unit tests and the acceptance binary.

#ifndef TUNECTL_TESTS_SUPPORT_TEST_SUPPORT_H_
#define TUNECTL_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tunectl/common/rng.h"
#include "tunectl/model/experiment.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

void WriteFile(const std::filesystem::path& path, std::string_view content);
std::string ReadFile(const std::filesystem::path& path);

// The MNIST experiment: maximize Validation-accuracy to 0.99, track
// accuracy, tune lr, num-layers and optimizer with Bayesian optimization at
// random_state 10, and pass hyperparameters as command-line flags.
std::string MnistExperimentYaml();

// A simulated experiment over named double parameters on [-5, 5].
ExperimentSpec SphereExperiment(std::string_view algorithm, std::uint64_t random_state,
                                int dimensions, int max_trials, int parallel);

ParameterSpec DoubleParameter(std::string name, double min, double max);
ParameterSpec IntParameter(std::string name, double min, double max);
ParameterSpec CategoricalParameter(std::string name, std::vector<std::string> values);

struct SpecGeneratorOptions {
  // Restricts the algorithm; empty picks one of the five builtins.
  std::string algorithm;
  // Keeps grids and hyperband schedules small enough to enumerate.
  bool small_search_space = true;
};

// A random experiment that satisfies every admission rule. The same seed always
// yields the same experiment.
ExperimentSpec RandomValidSpec(std::uint64_t seed, const SpecGeneratorOptions& options = {});

// Deterministic outcome of evaluating `assignments`: about one in five
// fails, the rest score in [0, 1).
suggest::TrialObservation SyntheticOutcome(const AssignmentSet& assignments,
                                           std::uint64_t salt);

}  // namespace tunectl::testing

#endif  // TUNECTL_TESTS_SUPPORT_TEST_SUPPORT_H_
