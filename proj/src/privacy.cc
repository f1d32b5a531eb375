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

#include "dpnc/privacy.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/norm_ball.h"
#include "dpnc/logging.h"
#include "dpnc/status_macros.h"

namespace dpnc {

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (epsilon > 1.0) {
    Warn(absl::StrCat("epsilon=", epsilon,
                      " exceeds 1; utility guarantees assume epsilon <= 1"));
  }
  return PrivacyBudget(epsilon, delta);
}

absl::StatusOr<double> GaussianMechanismStd(double sensitivity,
                                            const PrivacyBudget& budget) {
  if (!(sensitivity >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be nonnegative, got ", sensitivity));
  }
  return std::sqrt(2.0 * sensitivity * sensitivity *
                   std::log(1.25 / budget.delta())) /
         budget.epsilon();
}

double ClipScale(double norm, double clip) {
  return 1.0 / std::max(1.0, norm / clip);
}

absl::StatusOr<Eigen::VectorXd> ClipToNorm(const Eigen::VectorXd& g,
                                           double clip) {
  if (!(clip > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip bound must be positive, got ", clip));
  }
  Eigen::VectorXd out = g;
  internal::ProjectOntoBall(out, clip);
  return out;
}

absl::StatusOr<double> DpsgdNoiseStd(double sampling_rate, double clip,
                                     int64_t iterations,
                                     const PrivacyBudget& budget,
                                     int64_t batch_size, double c2,
                                     double c1) {
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", sampling_rate));
  }
  if (!(clip > 0.0) || iterations < 1 || batch_size < 1 || !(c2 > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DpsgdNoiseStd: clip, iterations, batch size and c2 must be positive "
        "(clip=", clip, ", T=", iterations, ", batch=", batch_size,
        ", c2=", c2, ")"));
  }
  const double t = static_cast<double>(iterations);
  if (budget.epsilon() >= c1 * sampling_rate * sampling_rate * t) {
    Warn(absl::StrCat("epsilon=", budget.epsilon(), " is not below c1*q^2*T=",
                      c1 * sampling_rate * sampling_rate * t));
  }
  return c2 * sampling_rate * clip * std::sqrt(t * std::log(1.0 / budget.delta())) /
         (static_cast<double>(batch_size) * budget.epsilon());
}

double AdvancedCompositionEpsilon(double epsilon, int64_t iterations,
                                  double delta_slack) {
  const double t = static_cast<double>(iterations);
  const double log_term = std::log(1.0 / delta_slack);
  auto total = [&](double e) {
    return e * std::sqrt(2.0 * t * log_term) + t * e * std::expm1(e);
  };
  double lo = 0.0;
  double hi = epsilon;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (total(mid) > epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

absl::StatusOr<double> StrictDpsgdNoiseStd(double clip, int64_t iterations,
                                           const PrivacyBudget& budget,
                                           int64_t batch_size) {
  if (!(clip > 0.0) || iterations < 1 || batch_size < 1) {
    return absl::InvalidArgumentError(
        "StrictDpsgdNoiseStd: clip, iterations and batch size must be positive");
  }
  const double delta_slack = budget.delta() / 2.0;
  const double per_step_delta =
      budget.delta() / (2.0 * static_cast<double>(iterations));
  const double per_step_eps =
      AdvancedCompositionEpsilon(budget.epsilon(), iterations, delta_slack);
  if (!(per_step_eps > 0.0)) {
    return absl::InternalError("advanced composition produced epsilon <= 0");
  }
  DPNC_ASSIGN_OR_RETURN(PrivacyBudget step_budget,
                        PrivacyBudget::Create(per_step_eps, per_step_delta));
  return GaussianMechanismStd(2.0 * clip / static_cast<double>(batch_size),
                              step_budget);
}

absl::StatusOr<Eigen::VectorXd> NoiseSource::Draw(int64_t iteration,
                                                  std::string_view mechanism,
                                                  double sensitivity,
                                                  double stddev,
                                                  int64_t dimension) {
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd noise,
                        GaussianVector(rng_, dimension, stddev));
  Record(iteration, mechanism, sensitivity, stddev, dimension);
  if (controls_.noise_mode == NoiseMode::kZero) noise.setZero();
  return noise;
}

void NoiseSource::AddTo(int64_t iteration, std::string_view mechanism,
                        double sensitivity, double stddev,
                        std::span<double> target) {
  if (controls_.noise_mode == NoiseMode::kZero) {
    for (size_t i = 0; i < target.size(); ++i) rng_.Gaussian();
  } else {
    AddGaussianNoise(rng_, stddev, target);
  }
  Record(iteration, mechanism, sensitivity, stddev,
         static_cast<int64_t>(target.size()));
}

void NoiseSource::Record(int64_t iteration, std::string_view mechanism,
                         double sensitivity, double stddev,
                         int64_t dimension) {
  if (controls_.noise_log == nullptr) return;
  controls_.noise_log->Append(NoiseEvent{iteration, std::string(mechanism),
                                         sensitivity, stddev, dimension});
}

}  // namespace dpnc
