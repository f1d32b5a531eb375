// Copyright 2026 The dpnc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "dpnc/relu_regression.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/norm_ball.h"
#include "dpnc/logging.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

absl::Status CheckReluData(const Dataset& data) {
  if (data.labels.size() != data.features.rows() || data.size() < 1) {
    return absl::InvalidArgumentError("dataset is empty or inconsistent");
  }
  if (!std::isfinite(data.label_bound)) {
    return absl::InvalidArgumentError(
        "ReLU regression needs a finite label bound B");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<BallConstraint> BallConstraint::Create(double radius) {
  if (!(radius > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("ball radius must be positive, got ", radius));
  }
  return BallConstraint(radius);
}

Eigen::VectorXd BallConstraint::Project(const Eigen::VectorXd& w) const {
  Eigen::VectorXd out = w;
  internal::ProjectOntoBall(out, radius_);
  return out;
}

double ReluGdNoiseVariance(double w_bound, double label_bound, int64_t t,
                           int64_t n, const PrivacyBudget& budget) {
  const double lip = 4.0 * w_bound + label_bound;
  const double nd = static_cast<double>(n);
  return 32.0 * lip * lip * static_cast<double>(t) *
         std::log(2.0 / budget.delta()) /
         (nd * nd * budget.epsilon() * budget.epsilon());
}

ReluGdSchedule DefaultReluGdSchedule(int64_t n, int64_t m,
                                     const PrivacyBudget& budget) {
  const double nd = static_cast<double>(n);
  const double eps = budget.epsilon();
  const double cap = nd * nd * eps * eps /
                     (static_cast<double>(m) * std::log(1.0 / budget.delta()));
  ReluGdSchedule schedule;
  schedule.iterations = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(std::min(nd, cap))));
  schedule.eta = std::min(
      1.0 / std::sqrt(static_cast<double>(schedule.iterations)), 0.5);
  return schedule;
}

absl::StatusOr<ModelVector> DpProjectedGdRelu(const Dataset& data,
                                              const PrivacyBudget& budget,
                                              const ReluGdOptions& options,
                                              Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckReluData(data));
  DPNC_ASSIGN_OR_RETURN(const BallConstraint ball,
                        BallConstraint::Create(2.0 * options.w_bound));
  if (options.iterations < 0 || options.projection_dim < 0) {
    return absl::InvalidArgumentError(
        "iterations and projection dimension must be nonnegative");
  }
  if (data.feature_norm_bound > 1.0 + 1e-12) {
    Warn(absl::StrCat("feature bound ", data.feature_norm_bound,
                      " exceeds 1; the noise scale assumes |x| <= 1"));
  }
  const int64_t n = data.size();
  const int64_t requested_m = options.projection_dim > 0
                                  ? options.projection_dim
                                  : DefaultProjectionDim(n, budget);
  DPNC_ASSIGN_OR_RETURN(JlMatrix phi, SampleJl(rng, requested_m, data.dim()));
  DPNC_ASSIGN_OR_RETURN(RowMatrix projected,
                        JlProjectRows(phi, data.features));
  const int64_t m = phi.rows();

  ReluGdSchedule schedule = DefaultReluGdSchedule(n, m, budget);
  if (options.iterations > 0) {
    schedule.iterations = options.iterations;
    schedule.eta = std::min(
        1.0 / std::sqrt(static_cast<double>(schedule.iterations)), 0.5);
  }
  if (options.eta.has_value()) {
    if (!(*options.eta > 0.0)) {
      return absl::InvalidArgumentError("step size must be positive");
    }
    schedule.eta = *options.eta;
  }
  if (schedule.eta > 0.5) {
    Warn(absl::StrCat("step ", schedule.eta, " exceeds 1/2; using 1/2"));
    schedule.eta = 0.5;
  }
  const int64_t t_total = schedule.iterations;
  const double variance = ReluGdNoiseVariance(
      options.w_bound, data.label_bound, t_total, n, budget);
  const double stddev = std::sqrt(variance);
  const double sensitivity =
      4.0 * (4.0 * options.w_bound + data.label_bound) /
      static_cast<double>(n);

  NoiseSource noise(rng, options.controls);
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd residual(n);
  for (int64_t t = 1; t <= t_total; ++t) {
    sum += w;
    if (options.iterates != nullptr) options.iterates->push_back(w);
    residual.noalias() = projected * w;
    residual = residual.cwiseMax(0.0) - data.labels;
    Eigen::VectorXd grad = inv_n * (projected.transpose() * residual);
    DPNC_ASSIGN_OR_RETURN(
        Eigen::VectorXd zeta,
        noise.Draw(t, "relu_projected_gd", sensitivity, stddev, m));
    w -= schedule.eta * (grad + zeta);
    internal::ProjectOntoBall(w, ball.radius());
  }
  Eigen::VectorXd average = sum / static_cast<double>(t_total);
  ModelVector model;
  model.w = phi.is_identity() ? average
                              : Eigen::VectorXd(phi.matrix().transpose() *
                                                average);
  return model;
}

double AdaptiveNoiseVariance(double rho, double w_norm, double label_bound,
                             int64_t batch_size, const PrivacyBudget& budget) {
  const double scale = rho * w_norm + label_bound;
  const double m = static_cast<double>(batch_size);
  return 8.0 * scale * scale * std::log(1.25 / budget.delta()) /
         (m * m * budget.epsilon() * budget.epsilon());
}

int64_t DefaultAdaptiveIterations(double w_bound, int64_t d,
                                  double alpha_target) {
  const double raw = std::ceil(
      std::log2(w_bound * std::sqrt(static_cast<double>(d)) / alpha_target));
  return std::max<int64_t>(1, static_cast<int64_t>(raw));
}

absl::StatusOr<ModelVector> AdaptiveDpBatchedGd(const Dataset& data,
                                                const PrivacyBudget& budget,
                                                const AdaptiveOptions& options,
                                                Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckReluData(data));
  const int64_t n = data.size();
  const int64_t t_total = options.iterations;
  if (t_total < 1) {
    return absl::InvalidArgumentError("iterations T must be positive");
  }
  if (t_total > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "T=", t_total, " exceeds n=", n, "; every batch needs a sample"));
  }
  if (!(options.eta > 0.0)) {
    return absl::InvalidArgumentError("step size must be positive");
  }
  double eta = options.eta;
  if (eta > 1.0 / 16.0) {
    Warn(absl::StrCat("step ", eta, " exceeds 1/16; using 1/16"));
    eta = 1.0 / 16.0;
  }
  const int64_t m = n / t_total;
  const double rho = data.feature_norm_bound;
  const double b = data.label_bound;
  if (options.trace != nullptr) options.trace->discarded = n - m * t_total;

  NoiseSource noise(rng, options.controls);
  const int64_t d = data.dim();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd residual(m);
  for (int64_t i = 1; i <= t_total; ++i) {
    const int64_t begin = (i - 1) * m;
    const auto batch = data.features.middleRows(begin, m);
    residual.noalias() = batch * w;
    residual = residual.cwiseMax(0.0) - data.labels.segment(begin, m);
    Eigen::VectorXd grad =
        (batch.transpose() * residual) / static_cast<double>(m);
    const double w_norm = w.norm();
    const double variance = AdaptiveNoiseVariance(rho, w_norm, b, m, budget);
    const double sensitivity =
        2.0 * (rho * w_norm + b) / static_cast<double>(m);
    DPNC_ASSIGN_OR_RETURN(
        Eigen::VectorXd zeta,
        noise.Draw(i, "adaptive_batched_gd", sensitivity,
                   std::sqrt(variance), d));
    w -= eta * (grad + zeta);
    if (options.trace != nullptr) {
      options.trace->batches.emplace_back(begin, begin + m);
      options.trace->variances.push_back(variance);
      options.trace->iterates.push_back(w);
    }
  }
  return ModelVector{std::move(w), std::nullopt};
}

}  // namespace dpnc
