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


// ReLU regression: DP projected GD in a JL-projected space for the
// well-specified model, and adaptive DP batched GD for the misspecified one.

#ifndef DPNC_RELU_REGRESSION_H_
#define DPNC_RELU_REGRESSION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/phased_sgd.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

class BallConstraint {
 public:
  static absl::StatusOr<BallConstraint> Create(double radius);

  double radius() const { return radius_; }
  // w * min(1, radius / |w|_2).
  Eigen::VectorXd Project(const Eigen::VectorXd& w) const;

 private:
  explicit BallConstraint(double radius) : radius_(radius) {}
  double radius_;
};

// 32 (4W + B)^2 T ln(2/delta) / (n^2 eps^2).
double ReluGdNoiseVariance(double w_bound, double label_bound, int64_t t,
                           int64_t n, const PrivacyBudget& budget);

struct ReluGdSchedule {
  int64_t iterations = 1;
  double eta = 0.5;
};

// T = min(n, n^2 eps^2 / (m ln(1/delta))) (at least 1) and
// eta = min(1/sqrt(T), 1/2).
ReluGdSchedule DefaultReluGdSchedule(int64_t n, int64_t m,
                                     const PrivacyBudget& budget);

struct ReluGdOptions {
  double w_bound = 1.0;  // W; iterates stay in the ball of radius 2W
  int64_t iterations = 0;  // 0: default schedule
  std::optional<double> eta;
  int64_t projection_dim = 0;  // 0: default projection dimension
  RunControls controls;
  // When set, receives the iterates w_1..w_T in R^m.
  std::vector<Eigen::VectorXd>* iterates = nullptr;
};

// Full-batch noisy projected GD on the ReLU surrogate in R^m starting from
// zero. Returns Phi^T times the mean of w_1..w_T, with the lift cleared.
absl::StatusOr<ModelVector> DpProjectedGdRelu(const Dataset& data,
                                              const PrivacyBudget& budget,
                                              const ReluGdOptions& options,
                                              Rng& rng);

// 8 (rho |w| + B)^2 ln(1.25/delta) / (m^2 eps^2).
double AdaptiveNoiseVariance(double rho, double w_norm, double label_bound,
                             int64_t batch_size, const PrivacyBudget& budget);

// ceil(log2(W sqrt(d) / alpha_target)), at least 1.
int64_t DefaultAdaptiveIterations(double w_bound, int64_t d,
                                  double alpha_target);

struct AdaptiveTrace {
  // [begin, end) row range of each batch, in iteration order.
  std::vector<std::pair<int64_t, int64_t>> batches;
  std::vector<double> variances;
  std::vector<Eigen::VectorXd> iterates;  // w_1..w_T
  int64_t discarded = 0;
};

struct AdaptiveOptions {
  int64_t iterations = 1;  // T
  double eta = 1.0 / 16.0;  // capped at 1/16
  RunControls controls;
  AdaptiveTrace* trace = nullptr;
};

// T disjoint consecutive batches of size floor(n/T); one noisy GD step per
// batch from w_0 = 0 with noise variance driven by the current |w|. The
// feature bound rho is the dataset's declared bound.
absl::StatusOr<ModelVector> AdaptiveDpBatchedGd(const Dataset& data,
                                                const PrivacyBudget& budget,
                                                const AdaptiveOptions& options,
                                                Rng& rng);

}  // namespace dpnc

#endif  // DPNC_RELU_REGRESSION_H_
