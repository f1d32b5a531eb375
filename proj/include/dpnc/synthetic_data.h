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

// Synthetic datasets with known ground truth.

#ifndef DPNC_SYNTHETIC_DATA_H_
#define DPNC_SYNTHETIC_DATA_H_

#include <cstdint>
#include <limits>
#include <string>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnc/link_function.h"
#include "dpnc/rng.h"

namespace dpnc {

// n rows of features with their labels. Every row satisfies
// |x_i|_2 <= feature_norm_bound and |y_i| <= label_bound.
struct Dataset {
  RowMatrix features;
  Eigen::VectorXd labels;
  double feature_norm_bound = 1.0;
  double label_bound = std::numeric_limits<double>::infinity();
  // Labels clipped into [-label_bound, label_bound] during generation.
  int64_t truncated = 0;

  int64_t size() const { return features.rows(); }
  int64_t dim() const { return features.cols(); }

  // Checks the declared bounds row by row (with 1e-12 relative slack).
  absl::Status Validate() const;
};

enum class ModelKind { kWellSpecGlm, kKernel, kTwoLayer, kMisspecified };

struct GroundTruth {
  Eigen::VectorXd w_star;
  double norm_bound = 1.0;  // W
  double noise_std = 0.0;
  ModelKind kind = ModelKind::kWellSpecGlm;

  static absl::StatusOr<GroundTruth> Create(Eigen::VectorXd w_star,
                                            double norm_bound,
                                            double noise_std, ModelKind kind);
};

// Random direction scaled to norm `norm`.
Eigen::VectorXd RandomVectorWithNorm(Rng& rng, int64_t d, double norm);

// Uniform direction on the sphere times a Uniform[0, 1] radius.
Eigen::VectorXd SampleScaledSphere(Rng& rng, int64_t d);
Eigen::VectorXd SampleUnitSphere(Rng& rng, int64_t d);
// Uniform on [-sqrt(3), sqrt(3)]^d: zero mean, identity covariance.
Eigen::VectorXd SampleIsotropicCube(Rng& rng, int64_t d);

// y = sigma(<w*, x>) + N(0, noise_std^2), clipped into [-B, B] when B is
// finite. The default B is the link's range bound.
Sampler WellSpecGlmSampler(const GroundTruth& truth, const LinkFunction& link,
                           double label_bound);

absl::StatusOr<Dataset> GenWellSpecGlm(Rng& rng, int64_t n, int64_t d,
                                       const GroundTruth& truth,
                                       const LinkFunction& link,
                                       double label_bound);
absl::StatusOr<Dataset> GenWellSpecGlm(Rng& rng, int64_t n, int64_t d,
                                       const GroundTruth& truth,
                                       const LinkFunction& link);

struct FeatureSample {
  RowMatrix features;
  double norm_bound = 0.0;  // sqrt(3 d)
};

absl::StatusOr<FeatureSample> GenLogConcaveFeatures(Rng& rng, int64_t n,
                                                    int64_t d);

// ReLU regression with a deterministic bounded bias term:
//   y = clip(max(0, <w*, x>) + rho * sign(sin(<v, x>)) + zeta, [-B, B]).
struct MisspecifiedReluModel {
  GroundTruth truth;
  Eigen::VectorXd bias_direction;  // v, unit norm
  double bias_amplitude = 0.0;     // rho
  double label_bound = std::numeric_limits<double>::infinity();

  // Conditional mean before clipping and noise.
  double CleanLabel(const Eigen::VectorXd& x) const;
  double Bias(const Eigen::VectorXd& x) const;
};

absl::StatusOr<MisspecifiedReluModel> MakeMisspecifiedReluModel(
    Rng& rng, GroundTruth truth, double bias_amplitude, double label_bound);

Sampler MisspecifiedReluSampler(const MisspecifiedReluModel& model);

absl::StatusOr<Dataset> GenMisspecifiedRelu(Rng& rng, int64_t n,
                                            const MisspecifiedReluModel& model);

// sigma_outer(sum_t b_t sigma_inner(<a_t, x>)) with unit-norm a_t and b.
struct TwoLayerTruth {
  RowMatrix hidden;        // k x d, unit rows
  Eigen::VectorXd output;  // length k, unit norm
  LinkFunction inner = LinkFunction::Sigmoid();
  LinkFunction outer = LinkFunction::Sigmoid();

  static absl::StatusOr<TwoLayerTruth> Create(RowMatrix hidden,
                                              Eigen::VectorXd output,
                                              LinkFunction inner,
                                              LinkFunction outer);
  static TwoLayerTruth Random(Rng& rng, int64_t k, int64_t d,
                              LinkFunction inner, LinkFunction outer);

  double Evaluate(const Eigen::VectorXd& x) const;
  int64_t width() const { return hidden.rows(); }
  int64_t dim() const { return hidden.cols(); }
};

// x on the unit sphere; y = N2(x) + zeta clipped to [0, 1].
Sampler TwoLayerSampler(const TwoLayerTruth& truth, double noise_std);

absl::StatusOr<Dataset> GenTwoLayer(Rng& rng, int64_t n,
                                    const TwoLayerTruth& truth,
                                    double noise_std);

// Binary task for the network experiments: x on the unit sphere,
// y = sign(N2(x)) in {-1, +1} (0 maps to +1), flipped with probability
// flip_prob.
Sampler TeacherClassificationSampler(const TwoLayerTruth& teacher,
                                     double flip_prob);

absl::StatusOr<Dataset> GenTeacherClassification(Rng& rng, int64_t n,
                                                 const TwoLayerTruth& teacher,
                                                 double flip_prob);

// Materializes n draws of `source` into a dataset with the given bounds.
Dataset DrawDataset(Rng& rng, int64_t n, int64_t d, const Sampler& source,
                    double feature_norm_bound, double label_bound);

// CSV with header x_0,...,x_{d-1},y and shortest round-trip decimals.
absl::Status WriteDatasetCsv(const Dataset& data, const std::string& path);
// Bounds of the loaded dataset are the observed maxima.
absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path);

}  // namespace dpnc

#endif  // DPNC_SYNTHETIC_DATA_H_
