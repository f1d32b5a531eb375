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


#include "dpnc/moreau.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/phased_engine.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

struct ResolvedMoreau {
  double beta;
  double gamma;
};

absl::StatusOr<ResolvedMoreau> ResolveMoreau(const MoreauOptions& options,
                                             int64_t n) {
  const double nd = static_cast<double>(n);
  ResolvedMoreau r;
  r.beta = options.beta.value_or(std::sqrt(nd));
  r.gamma = options.gamma.value_or(1.0 / (nd * std::log(nd)));
  if (!(r.beta > 0.0) || !(r.gamma > 0.0)) {
    return absl::InvalidArgumentError("beta and gamma must be positive");
  }
  if (!(options.r_param > 0.0)) {
    return absl::InvalidArgumentError("R must be positive");
  }
  return r;
}

absl::Status CheckBoundedLink(const LinkFunction& link) {
  if (!link.bounded()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "link ", link.name(),
        " is unbounded; use the ReLU regression solvers instead"));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ResolveOracleStep(const PhasedSgdOptions& options,
                                         int64_t n,
                                         const PrivacyBudget& budget,
                                         double rank, double cap) {
  double eta;
  if (options.eta.has_value()) {
    if (!(*options.eta > 0.0)) {
      return absl::InvalidArgumentError("step size must be positive");
    }
    eta = *options.eta * options.eta_multiplier;
  } else {
    eta = DefaultPhasedStep(n, budget, rank, options.eta_multiplier,
                            std::numeric_limits<double>::infinity());
  }
  return internal::CapStep(eta, cap, "2/beta or 1/beta");
}

}  // namespace

absl::StatusOr<MoreauConfig> MoreauConfig::Create(double beta, double gamma,
                                                  double b) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive and finite, got ", beta));
  }
  if (!(gamma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be positive, got ", gamma));
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    return absl::InvalidArgumentError(
        absl::StrCat("B must be positive and finite, got ", b));
  }
  return MoreauConfig(beta, gamma, b);
}

absl::StatusOr<int64_t> MoreauConfig::InnerIterations() const {
  const double raw = 144.0 * b_ * b_ / (gamma_ * gamma_);
  if (!(raw <= static_cast<double>(kMaxOracleIterations))) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oracle would need ", raw, " inner iterations (limit ",
        kMaxOracleIterations, "); increase gamma"));
  }
  // 144 / 0.1^2 evaluates to 14400.000000000002; snap such values.
  const double nearest = std::round(raw);
  const double t =
      std::abs(raw - nearest) <= 1e-9 * raw ? nearest : std::ceil(raw);
  return std::max<int64_t>(1, static_cast<int64_t>(t));
}

absl::StatusOr<double> EnvelopeSlope(const MoreauConfig& cfg,
                                     const LinkFunction& link, double a,
                                     double y,
                                     const IterateObserver& observer) {
  DPNC_ASSIGN_OR_RETURN(const int64_t iterations, cfg.InnerIterations());
  const double beta = cfg.beta();
  const double lo = a - cfg.HalfWidth();
  const double hi = a + cfg.HalfWidth();
  double u = a;
  double weighted = 0.0;
  for (int64_t t = 1; t <= iterations; ++t) {
    if (observer) observer(t, u);
    weighted += static_cast<double>(t) * u;
    const double step = 2.0 / (beta * static_cast<double>(t + 1));
    u = std::clamp(u - step * (link.Value(u) - y + beta * (u - a)), lo, hi);
  }
  if (observer) observer(iterations + 1, u);
  const double td = static_cast<double>(iterations);
  const double u_bar = weighted * 2.0 / (td * (td + 1.0));
  return beta * (a - u_bar);
}

absl::StatusOr<Eigen::VectorXd> ProxGradientOracle(const MoreauConfig& cfg,
                                                   const LinkFunction& link,
                                                   const Eigen::VectorXd& w,
                                                   const Eigen::VectorXd& x,
                                                   double y) {
  if (w.size() != x.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: w has ", w.size(), ", x has ", x.size()));
  }
  DPNC_ASSIGN_OR_RETURN(const double slope,
                        EnvelopeSlope(cfg, link, w.dot(x), y));
  return Eigen::VectorXd(slope * x);
}

absl::StatusOr<GridProx> GridProxOracle(const MoreauConfig& cfg,
                                        const LinkFunction& link, double a,
                                        double y, double resolution) {
  if (!(resolution > 0.0)) {
    return absl::InvalidArgumentError("grid resolution must be positive");
  }
  const double lo = a - cfg.HalfWidth();
  const int64_t points =
      static_cast<int64_t>(std::ceil(2.0 * cfg.HalfWidth() / resolution)) + 1;
  const double half_beta = 0.5 * cfg.beta();
  GridProx best{a, std::numeric_limits<double>::infinity()};
  for (int64_t j = 0; j < points; ++j) {
    const double u = std::min(lo + static_cast<double>(j) * resolution,
                              a + cfg.HalfWidth());
    DPNC_ASSIGN_OR_RETURN(const double area, link.Antiderivative(u));
    const double value = area - y * u + half_beta * (u - a) * (u - a);
    if (value < best.value) best = GridProx{u, value};
  }
  return best;
}

absl::StatusOr<ModelVector> PhasedSgdOracle(const Dataset& data,
                                            const LinkFunction& link,
                                            const PrivacyBudget& budget,
                                            const PhasedSgdOptions& options,
                                            const MoreauOptions& moreau,
                                            Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckBoundedLink(link));
  if (data.size() < 2) {
    return absl::InvalidArgumentError("phased SGD needs at least 2 samples");
  }
  DPNC_ASSIGN_OR_RETURN(const ResolvedMoreau resolved,
                        ResolveMoreau(moreau, data.size()));
  const double b = link.range_bound();
  DPNC_ASSIGN_OR_RETURN(const MoreauConfig cfg,
                        MoreauConfig::Create(resolved.beta, resolved.gamma, b));
  DPNC_RETURN_IF_ERROR(cfg.InnerIterations().status());
  DPNC_ASSIGN_OR_RETURN(
      const double eta,
      ResolveOracleStep(options, data.size(), budget,
                        static_cast<double>(data.dim()), 2.0 / resolved.beta));
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd w0,
                        internal::ResolveStart(options, data.dim()));
  const double r = moreau.r_param;
  const double scale =
      std::sqrt(std::log(1.0 / budget.delta())) / budget.epsilon();
  internal::PhasedEngineSpec spec;
  spec.mechanism = "phased_sgd_oracle";
  spec.eta = eta;
  spec.noise_std = [b, r, scale](double eta_i) {
    return 10.0 * b * r * eta_i * scale;
  };
  spec.sensitivity = [b, r](double eta_i) { return 5.0 * b * r * eta_i; };
  spec.slope = [&cfg, &link](double margin, double y) {
    return EnvelopeSlope(cfg, link, margin, y);
  };
  DPNC_ASSIGN_OR_RETURN(
      Eigen::VectorXd w,
      internal::RunPhasedEngine(data.features, data.labels, w0, spec,
                                options.controls, options.trace, rng));
  return ModelVector{std::move(w), std::nullopt};
}

absl::StatusOr<ModelVector> ProjectedPhasedSgdOracle(
    const Dataset& data, const LinkFunction& link, const PrivacyBudget& budget,
    const PhasedSgdOptions& options, const MoreauOptions& moreau, int64_t m,
    Rng& rng) {
  DPNC_RETURN_IF_ERROR(CheckBoundedLink(link));
  if (data.size() < 2) {
    return absl::InvalidArgumentError("phased SGD needs at least 2 samples");
  }
  if (m < 0) {
    return absl::InvalidArgumentError("projection dimension must be >= 0");
  }
  DPNC_ASSIGN_OR_RETURN(const ResolvedMoreau resolved,
                        ResolveMoreau(moreau, data.size()));
  const double b = link.range_bound();
  DPNC_ASSIGN_OR_RETURN(
      const MoreauConfig cfg,
      MoreauConfig::Create(resolved.beta, resolved.gamma, 2.0 * b));
  DPNC_RETURN_IF_ERROR(cfg.InnerIterations().status());
  if (m == 0) m = DefaultProjectionDim(data.size(), budget);
  DPNC_ASSIGN_OR_RETURN(JlMatrix phi, SampleJl(rng, m, data.dim()));
  DPNC_ASSIGN_OR_RETURN(RowMatrix projected,
                        JlProjectRows(phi, data.features));
  const int64_t working_dim = phi.rows();
  DPNC_ASSIGN_OR_RETURN(
      const double eta,
      ResolveOracleStep(options, data.size(), budget,
                        static_cast<double>(working_dim), 1.0 / resolved.beta));
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd w0,
                        internal::ResolveStart(options, working_dim));
  const double scale =
      std::sqrt(std::log(2.0 / budget.delta())) / budget.epsilon();
  internal::PhasedEngineSpec spec;
  spec.mechanism = "projected_phased_sgd_oracle";
  spec.eta = eta;
  spec.noise_std = [b, scale](double eta_i) {
    return 20.0 * b * eta_i * scale;
  };
  spec.sensitivity = [b](double eta_i) { return 10.0 * b * eta_i; };
  spec.slope = [&cfg, &link](double margin, double y) {
    return EnvelopeSlope(cfg, link, margin, y);
  };
  DPNC_ASSIGN_OR_RETURN(
      Eigen::VectorXd w,
      internal::RunPhasedEngine(projected, data.labels, w0, spec,
                                options.controls, options.trace, rng));
  return ModelVector{std::move(w), std::move(phi)};
}

}  // namespace dpnc
