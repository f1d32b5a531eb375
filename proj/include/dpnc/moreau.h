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


// Moreau-envelope gradient oracle for links without a subgradient everywhere,
// and the phased SGD drivers built on it.

#ifndef DPNC_MOREAU_H_
#define DPNC_MOREAU_H_

#include <cstdint>
#include <functional>
#include <optional>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/link_function.h"
#include "dpnc/phased_sgd.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

inline constexpr int64_t kMaxOracleIterations = 100'000'000;

class MoreauConfig {
 public:
  // beta: envelope parameter; gamma: oracle accuracy; b: the bound B that
  // sizes the search interval and the iteration count.
  static absl::StatusOr<MoreauConfig> Create(double beta, double gamma,
                                             double b);

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double b() const { return b_; }

  // 4B / beta.
  double HalfWidth() const { return 4.0 * b_ / beta_; }
  // ceil(144 B^2 / gamma^2); invalid-argument above kMaxOracleIterations.
  absl::StatusOr<int64_t> InnerIterations() const;

 private:
  MoreauConfig(double beta, double gamma, double b)
      : beta_(beta), gamma_(gamma), b_(b) {}

  double beta_;
  double gamma_;
  double b_;
};

// Receives (t, u_t) for t = 1..T+1.
using IterateObserver = std::function<void(int64_t, double)>;

// Projected GD on u -> g^y(u) + (beta/2)(u - a)^2 over [a - 4B/beta,
// a + 4B/beta], started at u_1 = a with steps 2 / (beta (t+1)). Returns
// beta (a - u_bar) where u_bar weights u_t by 2t / (T (T+1)).
absl::StatusOr<double> EnvelopeSlope(const MoreauConfig& cfg,
                                     const LinkFunction& link, double a,
                                     double y,
                                     const IterateObserver& observer = {});

// x * EnvelopeSlope(<w, x>).
absl::StatusOr<Eigen::VectorXd> ProxGradientOracle(const MoreauConfig& cfg,
                                                   const LinkFunction& link,
                                                   const Eigen::VectorXd& w,
                                                   const Eigen::VectorXd& x,
                                                   double y);

struct GridProx {
  double argmin = 0.0;
  // Envelope value g^y_beta(a) on the grid.
  double value = 0.0;
};

// Brute-force minimization of g^y(u) + (beta/2)(u - a)^2 on a uniform grid
// over the same interval, with g^y(u) = A(u) - y u.
absl::StatusOr<GridProx> GridProxOracle(const MoreauConfig& cfg,
                                        const LinkFunction& link, double a,
                                        double y, double resolution);

struct MoreauOptions {
  // Defaults: beta = sqrt(n), gamma = 1 / (n ln n).
  std::optional<double> beta;
  std::optional<double> gamma;
  // R in the phase noise 10 B R eta_i sqrt(ln(1/delta)) / eps.
  double r_param = 1.0;
};

// Phased SGD stepping on the oracle. Step cap eta <= 2/beta.
absl::StatusOr<ModelVector> PhasedSgdOracle(const Dataset& data,
                                            const LinkFunction& link,
                                            const PrivacyBudget& budget,
                                            const PhasedSgdOptions& options,
                                            const MoreauOptions& moreau,
                                            Rng& rng);

// JL-projected variant: oracle bound 2B, phase noise
// 20 B eta_i sqrt(ln(2/delta)) / eps, step cap eta <= 1/beta. m = 0 selects
// the default projection dimension.
absl::StatusOr<ModelVector> ProjectedPhasedSgdOracle(
    const Dataset& data, const LinkFunction& link, const PrivacyBudget& budget,
    const PhasedSgdOptions& options, const MoreauOptions& moreau, int64_t m,
    Rng& rng);

}  // namespace dpnc

#endif  // DPNC_MOREAU_H_
