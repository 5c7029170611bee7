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

#ifndef TUNECTL_SUGGEST_BAYESIAN_OPTIMIZATION_H_
#define TUNECTL_SUGGEST_BAYESIAN_OPTIMIZATION_H_

#include <optional>
#include <vector>

#include "tunectl/suggest/algorithm.h"
#include "tunectl/suggest/gaussian_process.h"
#include "tunectl/suggest/search_space.h"

namespace tunectl::suggest {

inline constexpr int kBoCandidates = 1000;
inline constexpr double kBoNoise = 1e-6;

// GP surrogate refit from history on every call, expected improvement over a
// shifted Halton candidate set. Pending points enter the fit with the best
// observed value (constant liar). Random draws until parameters + 2
// succeeded observations exist, and whenever the fit fails.
class BayesianOptimization : public SuggestionAlgorithm {
 public:
  std::string_view name() const override { return "bayesianoptimization"; }
  absl::StatusOr<SuggestionBatch> GetSuggestions(const SuggestionRequest& request) const override;
};

// The fitted surrogate for one suggestion, in minimization orientation.
class BoSurrogate {
 public:
  // nullopt when there are too few succeeded observations or the fit fails.
  static std::optional<BoSurrogate> Fit(const ExperimentSpec& spec,
                                        const std::vector<TrialObservation>& history,
                                        const std::vector<AssignmentSet>& pending);

  double ExpectedImprovementAt(const AssignmentSet& assignments) const;
  std::vector<double> ExpectedImprovements(const std::vector<AssignmentSet>& candidates) const;
  GaussianProcess::Prediction PredictAt(const AssignmentSet& assignments) const;
  double best() const { return best_; }
  const UnitEncoder& encoder() const { return encoder_; }

 private:
  BoSurrogate(UnitEncoder encoder, GaussianProcess gp, double best)
      : encoder_(std::move(encoder)), gp_(std::move(gp)), best_(best) {}

  UnitEncoder encoder_;
  GaussianProcess gp_;
  double best_;
};

// Halton point `index` (1-based) in `dim` dimensions, shifted modulo 1.
std::vector<double> ShiftedHalton(std::uint64_t index, const std::vector<double>& shift);

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_BAYESIAN_OPTIMIZATION_H_
