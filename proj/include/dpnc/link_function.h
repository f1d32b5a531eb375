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

// Link functions and the convex surrogate loss
//
//   l(w; x, y) = integral_0^<w,x> (sigma(z) - y) dz = A(<w,x>) - y <w,x>
//
// where A is the antiderivative of the link with A(0) = 0.

#ifndef DPNC_LINK_FUNCTION_H_
#define DPNC_LINK_FUNCTION_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/rng.h"

namespace dpnc {

class LinkFunction {
 public:
  using ScalarFn = std::function<double(double)>;

  static LinkFunction Sigmoid();
  static LinkFunction Tanh();
  // max(0, z); derivative at 0 is taken as 0.
  static LinkFunction Relu();
  // sigma(z) = z. Unbounded; mainly useful for closed-form checks.
  static LinkFunction Identity();
  // User supplied link. The antiderivative is evaluated by adaptive Simpson
  // quadrature with absolute tolerance 1e-10.
  static LinkFunction Custom(std::string name, ScalarFn value,
                             ScalarFn derivative, double lipschitz,
                             double range_bound,
                             bool has_subgradient_everywhere);

  const std::string& name() const { return name_; }
  double Value(double z) const;
  double Derivative(double z) const;
  absl::StatusOr<double> Antiderivative(double a) const;

  // G: Lipschitz constant of the link.
  double lipschitz() const { return lipschitz_; }
  // B: |sigma| <= B; infinity for unbounded links.
  double range_bound() const { return range_bound_; }
  bool bounded() const { return std::isfinite(range_bound_); }
  bool has_subgradient_everywhere() const {
    return has_subgradient_everywhere_;
  }

 private:
  enum class Kind { kSigmoid, kTanh, kRelu, kIdentity, kCustom };

  LinkFunction(Kind kind, std::string name, double lipschitz,
               double range_bound, bool has_subgradient_everywhere)
      : kind_(kind), name_(std::move(name)), lipschitz_(lipschitz),
        range_bound_(range_bound),
        has_subgradient_everywhere_(has_subgradient_everywhere) {}

  Kind kind_;
  std::string name_;
  double lipschitz_;
  double range_bound_;
  bool has_subgradient_everywhere_;
  ScalarFn value_;
  ScalarFn derivative_;
};

// "sigmoid" | "tanh" | "relu".
absl::StatusOr<LinkFunction> LinkByName(std::string_view name);

// Numerically stable log(1 + e^a).
double Softplus(double a);

// A(<w,x>) - y <w,x>.
absl::StatusOr<double> SurrogateLoss(const LinkFunction& link,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& x, double y);

// (sigma(<w,x>) - y) x.
absl::StatusOr<Eigen::VectorXd> SurrogateGrad(const LinkFunction& link,
                                              const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& x,
                                              double y);

struct LabeledPoint {
  Eigen::VectorXd x;
  double y = 0.0;
};

// Draws one fresh (x, y) pair.
using Sampler = std::function<LabeledPoint(Rng&)>;
using Predictor = std::function<double(const Eigen::VectorXd&)>;

struct RiskEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo mean and standard error of (predict(x) - y)^2 over n_test fresh
// samples. n_test must be at least 100.
absl::StatusOr<RiskEstimate> PopulationRiskMc(const Predictor& predict,
                                              const Sampler& source,
                                              int64_t n_test, Rng& rng);

// Paired estimate of L(model) - L(reference) on one shared test stream, so the
// label noise common to both cancels.
absl::StatusOr<RiskEstimate> ExcessRiskMc(const Predictor& model,
                                          const Predictor& reference,
                                          const Sampler& source,
                                          int64_t n_test, Rng& rng);

}  // namespace dpnc

#endif  // DPNC_LINK_FUNCTION_H_
