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

#include "tunectl/suggest/gaussian_process.h"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace tunectl::suggest {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix ToMatrix(const std::vector<std::vector<double>>& points, int dim) {
  RowMatrix m(static_cast<Eigen::Index>(points.size()), dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), j) = points[i][j];
  }
  return m;
}

// exp(-|a-b|^2 / (2 l^2)) for every pair of rows.
Eigen::MatrixXd Kernel(const RowMatrix& a, const RowMatrix& b, double length_scale) {
  const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
  const Eigen::VectorXd b2 = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  const double inv = -0.5 / (length_scale * length_scale);
  return (d2.array().max(0.0) * inv).exp().matrix();
}

}  // namespace

std::vector<double> LengthScaleGrid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.05 * std::pow(2.0, k / 2.0));
  return grid;
}

absl::StatusOr<GaussianProcess> GaussianProcess::Fit(
    const std::vector<std::vector<double>>& points, const std::vector<double>& targets,
    double length_scale, double noise) {
  if (points.empty() || points.size() != targets.size()) {
    return absl::InvalidArgumentError("GP needs one target per point and at least one point");
  }
  GaussianProcess gp;
  gp.n_ = static_cast<int>(points.size());
  gp.dim_ = static_cast<int>(points.front().size());
  gp.length_scale_ = length_scale;

  const Eigen::Map<const Eigen::VectorXd> y_raw(targets.data(), gp.n_);
  gp.y_mean_ = y_raw.mean();
  const double var = (y_raw.array() - gp.y_mean_).square().mean();
  gp.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd y = (y_raw.array() - gp.y_mean_) / gp.y_scale_;

  const RowMatrix x = ToMatrix(points, gp.dim_);
  Eigen::MatrixXd k = Kernel(x, x, length_scale);
  k.diagonal().array() += noise;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    return absl::FailedPreconditionError("kernel matrix is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  if (!l.diagonal().allFinite() || (l.diagonal().array() <= 0.0).any()) {
    return absl::FailedPreconditionError("degenerate Cholesky factor");
  }
  const Eigen::VectorXd alpha = llt.solve(y);
  gp.log_marginal_likelihood_ = -0.5 * y.dot(alpha) - l.diagonal().array().log().sum() -
                                0.5 * gp.n_ * std::log(2.0 * std::numbers::pi);

  gp.x_.assign(x.data(), x.data() + x.size());
  gp.chol_.assign(l.data(), l.data() + l.size());
  gp.alpha_.assign(alpha.data(), alpha.data() + alpha.size());
  return gp;
}

absl::StatusOr<GaussianProcess> GaussianProcess::FitMaxLikelihood(
    const std::vector<std::vector<double>>& points, const std::vector<double>& targets,
    double noise) {
  absl::StatusOr<GaussianProcess> best = absl::FailedPreconditionError("no length scale fit");
  for (double length_scale : LengthScaleGrid()) {
    auto fit = Fit(points, targets, length_scale, noise);
    if (!fit.ok()) continue;
    if (!best.ok() || fit->log_marginal_likelihood() > best->log_marginal_likelihood()) {
      best = std::move(fit);
    }
  }
  return best;
}

std::vector<GaussianProcess::Prediction> GaussianProcess::PredictBatch(
    const std::vector<std::vector<double>>& points) const {
  if (points.empty()) return {};
  const Eigen::Map<const RowMatrix> x(x_.data(), n_, dim_);
  const Eigen::Map<const Eigen::MatrixXd> l(chol_.data(), n_, n_);
  const Eigen::Map<const Eigen::VectorXd> alpha(alpha_.data(), n_);
  const RowMatrix q = ToMatrix(points, dim_);
  const Eigen::MatrixXd ks = Kernel(x, q, length_scale_);  // n x m
  const Eigen::VectorXd mean = ks.transpose() * alpha;
  const Eigen::MatrixXd v = l.triangularView<Eigen::Lower>().solve(ks);
  const Eigen::VectorXd var = (1.0 - v.colwise().squaredNorm().array()).max(1e-12);

  std::vector<Prediction> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out[i] = {mean(idx) * y_scale_ + y_mean_, std::sqrt(var(idx)) * y_scale_};
  }
  return out;
}

GaussianProcess::Prediction GaussianProcess::Predict(const std::vector<double>& point) const {
  return PredictBatch({point}).front();
}

double ExpectedImprovement(double mean, double stddev, double best) {
  const double improvement = best - mean;
  if (stddev <= 0.0) return std::max(improvement, 0.0);
  const double z = improvement / stddev;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return improvement * cdf + stddev * pdf;
}

}  // namespace tunectl::suggest
