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


// Polynomial feature maps and learning two-layer networks by running the
// GLM solvers on mapped features.

#ifndef DPNC_TWO_LAYER_H_
#define DPNC_TWO_LAYER_H_

#include <cstdint>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/link_function.h"
#include "dpnc/phased_sgd.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

inline constexpr int64_t kDefaultFeatureCap = 200'000;

// psi(x) = concat_j (c_j / s) x^{(x) j} for j = 0..degree, with
// s = sqrt(sum_j c_j^2), so |psi(x)| <= 1 on the unit ball.
class FeatureMap {
 public:
  int64_t input_dim() const { return input_dim_; }
  int64_t output_dim() const { return output_dim_; }
  int64_t degree() const { return static_cast<int64_t>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double normalizer() const { return normalizer_; }

  absl::StatusOr<Eigen::VectorXd> Apply(const Eigen::VectorXd& x) const;
  absl::StatusOr<RowMatrix> ApplyRows(const RowMatrix& features) const;

  // sum_j (c_j / s)^2 <x, x'>^j, the kernel psi induces.
  double Kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& xp) const;

 private:
  friend absl::StatusOr<FeatureMap> MultinomialFeatureMap(
      int64_t d, int64_t degree, std::vector<double> coeffs, int64_t cap);

  int64_t input_dim_ = 0;
  int64_t output_dim_ = 0;
  std::vector<double> coeffs_;
  double normalizer_ = 1.0;
};

// D_m = 1 + d + ... + d^degree. Fails when D_m exceeds `cap`.
absl::StatusOr<FeatureMap> MultinomialFeatureMap(
    int64_t d, int64_t degree, std::vector<double> coeffs,
    int64_t cap = kDefaultFeatureCap);

// Maclaurin coefficients c_0..c_degree of the link. ReLU has no expansion at
// 0, so its smooth surrogate softplus is expanded instead.
absl::StatusOr<std::vector<double>> TaylorCoefficients(
    const LinkFunction& link, int64_t degree);

enum class ApproxKind { kSigmoid, kRelu };

// ceil(c ln(1/alpha)) for sigmoid, ceil(c / alpha) for ReLU.
absl::StatusOr<int64_t> DegreeForAccuracy(ApproxKind kind, double alpha,
                                          double c_deg = 1.0);

// h(x) = sigma_2(<w, psi(x)>).
struct KernelModel {
  Eigen::VectorXd w;
  FeatureMap map;
  LinkFunction outer = LinkFunction::Sigmoid();

  absl::StatusOr<double> Predict(const Eigen::VectorXd& x) const;
};

// kPhased exactly when eps > theta / n.
absl::StatusOr<GlmPath> SelectTwoLayerPath(double epsilon, double theta,
                                           int64_t n);

struct TwoLayerResult {
  KernelModel model;
  GlmPath path = GlmPath::kPhased;
};

// Maps the features through psi and runs PhasedSgd or ProjectedPhasedSgd
// (projection dimension ceil(ln(n/delta) n eps)). The step cap is 1/G on
// both paths.
absl::StatusOr<TwoLayerResult> DpTwoLayer(const Dataset& data,
                                          const FeatureMap& map,
                                          const LinkFunction& outer,
                                          const PrivacyBudget& budget,
                                          double theta,
                                          const PhasedSgdOptions& options,
                                          Rng& rng);

}  // namespace dpnc

#endif  // DPNC_TWO_LAYER_H_
