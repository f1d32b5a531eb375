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


#include "dpnc/phased_sgd.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/phased_engine.h"
#include "dpnc/logging.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace internal {

absl::StatusOr<Eigen::VectorXd> RunPhasedEngine(
    const RowMatrix& features, const Eigen::VectorXd& labels,
    const Eigen::VectorXd& w0, const PhasedEngineSpec& spec,
    const RunControls& controls, PhasedTrace* trace, Rng& rng) {
  DPNC_ASSIGN_OR_RETURN(PhaseSchedule schedule,
                        MakePhaseSchedule(features.rows(), spec.eta));
  NoiseSource noise(rng, controls);
  const int64_t dim = features.cols();
  Eigen::VectorXd w = w0;
  Eigen::VectorXd sum(dim);
  int64_t offset = 0;
  for (size_t i = 0; i < schedule.phases.size(); ++i) {
    const Phase& phase = schedule.phases[i];
    sum.setZero();
    for (int64_t t = 0; t < phase.size; ++t) {
      sum += w;
      const int64_t row = offset + t;
      const auto x = features.row(row);
      DPNC_ASSIGN_OR_RETURN(const double slope,
                            spec.slope(x.dot(w), labels(row)));
      w.noalias() -= (phase.step * slope) * x.transpose();
    }
    Eigen::VectorXd average = sum / static_cast<double>(phase.size);
    if (trace != nullptr) {
      trace->phase_starts.push_back(offset);
      trace->pre_noise_averages.push_back(average);
    }
    DPNC_ASSIGN_OR_RETURN(
        Eigen::VectorXd zeta,
        noise.Draw(static_cast<int64_t>(i) + 1, spec.mechanism,
                   spec.sensitivity(phase.step), spec.noise_std(phase.step),
                   dim));
    w = average + zeta;
    offset += phase.size;
  }
  return w;
}

absl::StatusOr<Eigen::VectorXd> ResolveStart(const PhasedSgdOptions& options,
                                             int64_t dim) {
  if (!options.w0.has_value()) return Eigen::VectorXd::Zero(dim);
  if (options.w0->size() != dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "w0 has dimension ", options.w0->size(), ", expected ", dim));
  }
  return *options.w0;
}

double CapStep(double eta, double cap, const char* what) {
  if (eta > cap) {
    Warn(absl::StrCat("step ", eta, " exceeds the ", what, " cap ", cap,
                      "; using the cap"));
    return cap;
  }
  return eta;
}

}  // namespace internal

namespace {

absl::Status CheckSmoothLink(const LinkFunction& link) {
  if (!link.bounded()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "link ", link.name(),
        " is unbounded; use the ReLU regression solvers instead"));
  }
  if (!link.has_subgradient_everywhere()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "link ", link.name(),
        " lacks a subgradient everywhere; use the Moreau oracle drivers"));
  }
  return absl::OkStatus();
}

absl::Status CheckData(const Dataset& data) {
  if (data.labels.size() != data.features.rows()) {
    return absl::InvalidArgumentError("features and labels disagree in size");
  }
  if (data.size() < 2) {
    return absl::InvalidArgumentError("phased SGD needs at least 2 samples");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ResolveStep(const PhasedSgdOptions& options,
                                   int64_t n, const PrivacyBudget& budget,
                                   double rank, double cap) {
  double eta;
  if (options.eta.has_value()) {
    if (!(*options.eta > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("step size must be positive, got ", *options.eta));
    }
    eta = *options.eta * options.eta_multiplier;
  } else {
    eta = DefaultPhasedStep(n, budget, rank, options.eta_multiplier,
                            std::numeric_limits<double>::infinity());
  }
  return internal::CapStep(eta, cap, "step-size");
}

}  // namespace

absl::StatusOr<PhaseSchedule> MakePhaseSchedule(int64_t n, double eta) {
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("phase schedule needs n >= 2, got ", n));
  }
  if (!(eta > 0.0)) {
    return absl::InvalidArgumentError("base step must be positive");
  }
  PhaseSchedule schedule;
  int64_t k = 0;
  while ((int64_t{1} << k) < n) ++k;
  schedule.nominal_phases = k;
  int64_t used = 0;
  double step = eta;
  for (int64_t i = 1; i <= k; ++i) {
    step /= 4.0;
    const int64_t size = n >> i;
    if (size == 0) break;
    schedule.phases.push_back(Phase{size, step});
    used += size;
  }
  schedule.discarded = n - used;
  return schedule;
}

Eigen::VectorXd ModelVector::Lifted() const {
  if (!lift.has_value() || lift->is_identity()) return w;
  return lift->matrix().transpose() * w;
}

double DefaultPhasedStep(int64_t n, const PrivacyBudget& budget, double r,
                         double multiplier, double cap) {
  const double privacy_term =
      budget.epsilon() / std::sqrt(r * std::log(1.0 / budget.delta()));
  const double sampling_term = 1.0 / std::sqrt(static_cast<double>(n));
  return std::min(multiplier * std::min(privacy_term, sampling_term), cap);
}

int64_t DefaultProjectionDim(int64_t n, const PrivacyBudget& budget,
                             double exponent) {
  const double nd = static_cast<double>(n);
  return static_cast<int64_t>(
      std::ceil(std::log(nd / budget.delta()) *
                std::pow(nd * budget.epsilon(), exponent)));
}

absl::StatusOr<ModelVector> PhasedSgd(const Dataset& data,
                                      const LinkFunction& link,
                                      const PrivacyBudget& budget,
                                      const PhasedSgdOptions& options,
                                      Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckSmoothLink(link));
  DPNC_RETURN_IF_ERROR(CheckData(data));
  DPNC_ASSIGN_OR_RETURN(
      const double eta,
      ResolveStep(options, data.size(), budget,
                  static_cast<double>(data.dim()), 2.0 / link.lipschitz()));
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd w0,
                        internal::ResolveStart(options, data.dim()));
  const double b = link.range_bound();
  const double scale =
      std::sqrt(std::log(1.0 / budget.delta())) / budget.epsilon();
  internal::PhasedEngineSpec spec;
  spec.mechanism = "phased_sgd";
  spec.eta = eta;
  spec.noise_std = [b, scale](double eta_i) { return 8.0 * b * eta_i * scale; };
  spec.sensitivity = [b](double eta_i) { return 4.0 * b * eta_i; };
  spec.slope = [&link](double margin, double y) -> absl::StatusOr<double> {
    return link.Value(margin) - y;
  };
  DPNC_ASSIGN_OR_RETURN(
      Eigen::VectorXd w,
      internal::RunPhasedEngine(data.features, data.labels, w0, spec,
                                options.controls, options.trace, rng));
  return ModelVector{std::move(w), std::nullopt};
}

absl::StatusOr<ModelVector> ProjectedPhasedSgd(const Dataset& data,
                                               const LinkFunction& link,
                                               const PrivacyBudget& budget,
                                               const PhasedSgdOptions& options,
                                               int64_t m, Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckSmoothLink(link));
  DPNC_RETURN_IF_ERROR(CheckData(data));
  if (m < 0) {
    return absl::InvalidArgumentError("projection dimension must be >= 0");
  }
  if (m == 0) m = DefaultProjectionDim(data.size(), budget);
  DPNC_ASSIGN_OR_RETURN(JlMatrix phi, SampleJl(rng, m, data.dim()));
  DPNC_ASSIGN_OR_RETURN(RowMatrix projected,
                        JlProjectRows(phi, data.features));
  const int64_t working_dim = phi.rows();
  DPNC_ASSIGN_OR_RETURN(
      const double eta,
      ResolveStep(options, data.size(), budget,
                  static_cast<double>(working_dim), 1.0));
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd w0,
                        internal::ResolveStart(options, working_dim));
  const double b = link.range_bound();
  const double scale =
      std::sqrt(std::log(2.0 / budget.delta())) / budget.epsilon();
  internal::PhasedEngineSpec spec;
  spec.mechanism = "projected_phased_sgd";
  spec.eta = eta;
  spec.noise_std = [b, scale](double eta_i) {
    return 16.0 * b * eta_i * scale;
  };
  spec.sensitivity = [b](double eta_i) { return 8.0 * b * eta_i; };
  spec.slope = [&link](double margin, double y) -> absl::StatusOr<double> {
    return link.Value(margin) - y;
  };
  DPNC_ASSIGN_OR_RETURN(
      Eigen::VectorXd w,
      internal::RunPhasedEngine(projected, data.labels, w0, spec,
                                options.controls, options.trace, rng));
  return ModelVector{std::move(w), std::move(phi)};
}

absl::StatusOr<GlmPath> SelectGlmPath(double epsilon, double theta,
                                      int64_t n) {
  if (!(theta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rank bound theta must be positive, got ", theta));
  }
  if (n < 1) return absl::InvalidArgumentError("n must be positive");
  if (theta > static_cast<double>(n)) {
    Warn(absl::StrCat("theta=", theta, " exceeds n=", n));
  }
  return epsilon > std::pow(theta, 1.5) / static_cast<double>(n)
             ? GlmPath::kPhased
             : GlmPath::kProjected;
}

absl::StatusOr<DpGlmResult> DpGlm(const Dataset& data,
                                  const LinkFunction& link,
                                  const PrivacyBudget& budget, double theta,
                                  const PhasedSgdOptions& options, Rng& rng) {
  DPNC_ASSIGN_OR_RETURN(const GlmPath path,
                        SelectGlmPath(budget.epsilon(), theta, data.size()));
  if (path == GlmPath::kPhased) {
    PhasedSgdOptions resolved = options;
    if (!resolved.eta.has_value()) {
      resolved.eta = DefaultPhasedStep(data.size(), budget, theta, 1.0,
                                       2.0 / link.lipschitz());
    }
    DPNC_ASSIGN_OR_RETURN(ModelVector model,
                          PhasedSgd(data, link, budget, resolved, rng));
    return DpGlmResult{std::move(model), path};
  }
  DPNC_ASSIGN_OR_RETURN(ModelVector model,
                        ProjectedPhasedSgd(data, link, budget, options, 0, rng));
  return DpGlmResult{std::move(model), path};
}

}  // namespace dpnc
