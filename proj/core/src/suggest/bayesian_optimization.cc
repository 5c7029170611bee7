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

#include "tunectl/suggest/bayesian_optimization.h"

#include <algorithm>
#include <cmath>

#include <glog/logging.h>

#include "tunectl/common/rng.h"
#include "tunectl/common/status_macros.h"

namespace tunectl::suggest {
namespace {

std::vector<int> FirstPrimes(std::size_t count) {
  std::vector<int> primes;
  for (int candidate = 2; primes.size() < count; ++candidate) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(candidate);
  }
  return primes;
}

double RadicalInverse(std::uint64_t index, int base) {
  double result = 0.0;
  double fraction = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * fraction;
    index /= base;
    fraction /= base;
  }
  return result;
}

std::size_t SucceededCount(const std::vector<TrialObservation>& history) {
  return std::count_if(history.begin(), history.end(), [](const TrialObservation& o) {
    return o.status == ObservationStatus::kSucceeded;
  });
}

}  // namespace

std::vector<double> ShiftedHalton(std::uint64_t index, const std::vector<double>& shift) {
  static const std::vector<int> kPrimes = FirstPrimes(256);
  std::vector<double> point(shift.size());
  for (std::size_t d = 0; d < shift.size(); ++d) {
    const double value = RadicalInverse(index, kPrimes[d % kPrimes.size()]) + shift[d];
    point[d] = value - std::floor(value);
  }
  return point;
}

std::optional<BoSurrogate> BoSurrogate::Fit(const ExperimentSpec& spec,
                                            const std::vector<TrialObservation>& history,
                                            const std::vector<AssignmentSet>& pending) {
  if (SucceededCount(history) < spec.parameters.size() + 2) return std::nullopt;
  UnitEncoder encoder(spec.parameters);
  std::vector<std::vector<double>> points;
  std::vector<double> targets;
  double best = INFINITY;
  for (const auto& observation : history) {
    if (observation.status != ObservationStatus::kSucceeded) continue;
    const double y = Minimized(spec, *observation.objective_value);
    points.push_back(encoder.Encode(observation.assignments));
    targets.push_back(y);
    best = std::min(best, y);
  }
  for (const auto& assignments : pending) {
    points.push_back(encoder.Encode(assignments));
    targets.push_back(best);
  }
  auto gp = GaussianProcess::FitMaxLikelihood(points, targets, kBoNoise);
  if (!gp.ok()) {
    LOG(WARNING) << "surrogate fit failed for " << spec.name << ": " << gp.status().message()
                 << "; falling back to random sampling";
    return std::nullopt;
  }
  return BoSurrogate(std::move(encoder), *std::move(gp), best);
}

GaussianProcess::Prediction BoSurrogate::PredictAt(const AssignmentSet& assignments) const {
  return gp_.Predict(encoder_.Encode(assignments));
}

double BoSurrogate::ExpectedImprovementAt(const AssignmentSet& assignments) const {
  const auto prediction = PredictAt(assignments);
  return ExpectedImprovement(prediction.mean, prediction.stddev, best_);
}

std::vector<double> BoSurrogate::ExpectedImprovements(
    const std::vector<AssignmentSet>& candidates) const {
  std::vector<std::vector<double>> points;
  points.reserve(candidates.size());
  for (const auto& candidate : candidates) points.push_back(encoder_.Encode(candidate));
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& prediction : gp_.PredictBatch(points)) {
    out.push_back(ExpectedImprovement(prediction.mean, prediction.stddev, best_));
  }
  return out;
}

absl::StatusOr<SuggestionBatch> BayesianOptimization::GetSuggestions(
    const SuggestionRequest& request) const {
  TUNECTL_RETURN_IF_ERROR(CheckRequest(request));
  TUNECTL_ASSIGN_OR_RETURN(nlohmann::json state, LoadState(*this, request));
  const ExperimentSpec& spec = *request.experiment;
  const std::uint64_t random_state = RandomState(spec);
  std::uint64_t issued = IssuedCount(state);
  std::vector<AssignmentSet> taken = TakenAssignments(request);
  std::vector<AssignmentSet> pending = request.pending;

  SuggestionBatch batch;
  for (int i = 0; i < request.count; ++i, ++issued) {
    std::optional<AssignmentSet> choice;
    if (auto surrogate = BoSurrogate::Fit(spec, request.history, pending)) {
      const UnitEncoder& encoder = surrogate->encoder();
      Rng rng(DeriveSeed(random_state, "bo-shift", issued));
      std::vector<double> shift(static_cast<std::size_t>(encoder.dimension()));
      for (double& s : shift) s = rng.Uniform01();

      std::vector<AssignmentSet> candidates;
      for (int c = 1; c <= kBoCandidates; ++c) {
        AssignmentSet candidate = encoder.Decode(ShiftedHalton(c, shift));
        if (!ContainsAssignment(taken, candidate)) candidates.push_back(std::move(candidate));
      }
      const std::vector<double> scores = surrogate->ExpectedImprovements(candidates);
      double best_ei = -1.0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double ei = scores[c];
        if (ei > best_ei) {
          best_ei = ei;
          choice = candidates[c];
        }
      }
    }
    if (!choice) choice = SampleDistinct(spec, issued, taken);
    taken.push_back(*choice);
    pending.push_back(*choice);
    batch.assignments.push_back(*std::move(choice));
  }
  state["issued"] = issued;
  batch.state = state.dump();
  return batch;
}

}  // namespace tunectl::suggest
