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

#ifndef TUNECTL_SUGGEST_TPE_H_
#define TUNECTL_SUGGEST_TPE_H_

#include <vector>

#include "tunectl/common/rng.h"
#include "tunectl/suggest/algorithm.h"

namespace tunectl::suggest {

inline constexpr int kTpeMinHistory = 10;
inline constexpr double kTpeGamma = 0.25;
inline constexpr int kTpeCandidates = 24;

// Tree-structured Parzen estimator with independent per-parameter densities.
// Splits succeeded trials into the best ceil(gamma * n) and the rest, samples
// candidates from the good-set density l and keeps the one maximizing l / g.
class TreeParzenEstimator : public SuggestionAlgorithm {
 public:
  std::string_view name() const override { return "tpe"; }
  absl::StatusOr<SuggestionBatch> GetSuggestions(const SuggestionRequest& request) const override;
};

// Mixture of Gaussians truncated to [0,1]: one kernel per observation plus a
// wide prior kernel at the center.
class ParzenDensity {
 public:
  explicit ParzenDensity(std::vector<double> observations);

  double LogDensity(double x) const;
  double Sample(Rng& rng) const;

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& bandwidths() const { return bandwidths_; }

 private:
  std::vector<double> means_;
  std::vector<double> bandwidths_;
  std::vector<double> masses_;  // probability mass of each kernel inside [0,1]
};

// Smoothed categorical weights (count + 1) / (n + k).
class CategoryDensity {
 public:
  CategoryDensity(const std::vector<int>& observations, int categories);

  double LogDensity(int category) const;
  int Sample(Rng& rng) const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_TPE_H_
