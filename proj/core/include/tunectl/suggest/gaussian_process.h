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

#ifndef TUNECTL_SUGGEST_GAUSSIAN_PROCESS_H_
#define TUNECTL_SUGGEST_GAUSSIAN_PROCESS_H_

#include <vector>

#include "absl/status/statusor.h"

namespace tunectl::suggest {

// Zero-mean GP regression with a unit-variance squared-exponential kernel
// over standardized targets.
class GaussianProcess {
 public:
  // `points` are rows of equal dimension. Fails when the kernel matrix is not
  // positive definite.
  static absl::StatusOr<GaussianProcess> Fit(const std::vector<std::vector<double>>& points,
                                             const std::vector<double>& targets,
                                             double length_scale, double noise);

  // Picks the length scale from LengthScaleGrid() with the highest log
  // marginal likelihood. Fails only if every candidate fails.
  static absl::StatusOr<GaussianProcess> FitMaxLikelihood(
      const std::vector<std::vector<double>>& points, const std::vector<double>& targets,
      double noise);

  struct Prediction {
    double mean;
    double stddev;
  };
  // In the units of the original targets.
  Prediction Predict(const std::vector<double>& point) const;
  std::vector<Prediction> PredictBatch(const std::vector<std::vector<double>>& points) const;

  double length_scale() const { return length_scale_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }

 private:
  GaussianProcess() = default;

  int n_ = 0;
  int dim_ = 0;
  double length_scale_ = 1.0;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double log_marginal_likelihood_ = 0.0;
  std::vector<double> x_;      // n x dim, row-major
  std::vector<double> chol_;   // n x n lower factor, column-major
  std::vector<double> alpha_;  // K^-1 y
};

// 0.05 * 2^(k/2) for k = 0..10.
std::vector<double> LengthScaleGrid();

// Expected improvement below `best` for a minimization problem.
double ExpectedImprovement(double mean, double stddev, double best);

}  // namespace tunectl::suggest

#endif  // TUNECTL_SUGGEST_GAUSSIAN_PROCESS_H_
