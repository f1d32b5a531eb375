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


// Bias-free ReLU network f(W, x) = sqrt(m) W_L relu(W_{L-1} ... relu(W_1 x)),
// DP-SGD training with Poisson sampling, clipping and projection, and the
// neural tangent random feature (NTRF) linearization.

#ifndef DPNC_MLP_H_
#define DPNC_MLP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

// layers[0] = W_1 (m x d), layers[1..L-2] = m x m, layers[L-1] = W_L (1 x m).
struct MlpParams {
  std::vector<Eigen::MatrixXd> layers;

  int64_t depth() const { return static_cast<int64_t>(layers.size()); }
  int64_t width() const { return layers.empty() ? 0 : layers[0].rows(); }
  int64_t input_dim() const { return layers.empty() ? 0 : layers[0].cols(); }

  // Same shapes, all zeros.
  MlpParams ZerosLike() const;
  double SquaredNorm() const;
  double Dot(const MlpParams& other) const;
  // this += scale * other.
  void AddScaled(const MlpParams& other, double scale);
  int64_t ParameterCount() const;
};

// Checks that the layers form a valid L >= 2 network.
absl::Status ValidateShapes(const MlpParams& params);
absl::Status CheckSameShape(const MlpParams& a, const MlpParams& b);

// Hidden layers N(0, 2/m), output layer N(0, 1/m), drawn layer by layer in
// row-major order.
absl::StatusOr<MlpParams> InitParams(Rng& rng, int64_t depth, int64_t width,
                                     int64_t input_dim);

struct ForwardTrace {
  // hidden[0] = x, hidden[l] = h_l for l = 1..L-1.
  std::vector<Eigen::VectorXd> hidden;
  // masks[l-1](j) = 1 exactly when the pre-activation of h_l(j) is > 0.
  std::vector<Eigen::VectorXd> masks;
  double output = 0.0;
};

absl::StatusOr<ForwardTrace> Forward(const MlpParams& params,
                                     const Eigen::VectorXd& x);

// Network outputs for every row of `features`.
absl::StatusOr<Eigen::VectorXd> ForwardBatch(const MlpParams& params,
                                             const RowMatrix& features);

enum class LossKind {
  // softplus(-y f) with y in {-1, +1}.
  kLogistic,
  // (clamp(f, -c, c) - y)^2 / 2.
  kSquared,
};

struct ScalarLoss {
  LossKind kind = LossKind::kLogistic;
  double clamp = 1.0;

  double Value(double f, double y) const;
  double Derivative(double f, double y) const;
};

// Gradient of loss(f(W, x), y) in W.
absl::StatusOr<MlpParams> PerSampleGrad(const MlpParams& params,
                                        const Eigen::VectorXd& x, double y,
                                        const ScalarLoss& loss);

// Gradient of f(W, x) in W.
absl::StatusOr<MlpParams> OutputGradient(const MlpParams& params,
                                         const Eigen::VectorXd& x);

// W_l * min(1, R / |W_l|_F) for every layer independently.
MlpParams ProjectLayers(const MlpParams& params, double radius);

struct ClippedBatchGradient {
  MlpParams sum;                    // sum of clipped per-sample gradients
  std::vector<double> raw_norms;    // |g_j| before clipping
  std::vector<double> clipped_norms;
};

// Relative shrink applied to active clips so that rounding in the
// materialized gradient cannot push its norm above the bound.
inline constexpr double kClipMargin = 1e-12;

// Per-sample gradients of the selected rows, each clipped to Frobenius norm
// `clip` over all layers jointly (to clip * (1 - kClipMargin) when the clip
// is active), then summed in row order.
absl::StatusOr<ClippedBatchGradient> ClippedGradientSum(
    const MlpParams& params, const RowMatrix& features,
    const Eigen::VectorXd& labels, const std::vector<int64_t>& rows,
    double clip, const ScalarLoss& loss);

enum class NoiseCalibration {
  // c2 q C sqrt(T ln(1/delta)) / (|B_t| eps).
  kTheorem,
  // Gaussian mechanism with sensitivity 2C/|B_t| per step and advanced
  // composition over T steps.
  kStrict,
};

struct DpSgdConfig {
  // Unset: sqrt(L) R / (C sqrt(m T)).
  std::optional<double> eta;
  double expected_batch = 0.0;  // M; q = M / n
  int64_t iterations = 1;       // T
  double clip = 1.0;            // C
  double radius = 1.0;          // R
  double c2 = 1.0;
  double c1 = 1.0;
  NoiseCalibration calibration = NoiseCalibration::kTheorem;
  // Fixed per-step std, bypassing calibration.
  std::optional<double> noise_std_override;
};

// Validates the config against the data size and returns q = M / n.
absl::StatusOr<double> ValidateDpSgdConfig(const DpSgdConfig& cfg, int64_t n);

// sqrt(L) R / (C sqrt(m T)).
double DefaultDpSgdStep(int64_t depth, int64_t width, double radius,
                        double clip, int64_t iterations);

struct DpSgdObserver {
  // Called after every iteration t = 1..T with the post-projection iterate.
  std::function<void(int64_t t, const MlpParams& iterate)> on_iterate;
  std::function<void(int64_t t, const ClippedBatchGradient& grads)> on_batch;
  std::function<void(int64_t t, int64_t batch_size)> on_batch_size;
};

struct DpSgdResult {
  MlpParams averaged;  // mean of W^(1)..W^(T)
  MlpParams last;      // W^(T)
  int64_t empty_batches = 0;
  double eta = 0.0;
};

// DP-SGD: each iteration Poisson-samples rows with rate q, clips per-sample
// gradients to C, adds N(0, sigma_t^2 I) to the batch mean, steps and
// projects every layer onto the Frobenius ball of radius R. An empty batch
// leaves the iterate unchanged and draws no noise.
absl::StatusOr<DpSgdResult> DpSgdTrain(const Dataset& data,
                                       const MlpParams& w0,
                                       const DpSgdConfig& cfg,
                                       const PrivacyBudget& budget,
                                       const ScalarLoss& loss,
                                       const RunControls& controls, Rng& rng,
                                       const DpSgdObserver* observer = nullptr);

// Mean loss of the network over a dataset.
absl::StatusOr<double> MeanLoss(const MlpParams& params, const Dataset& data,
                                const ScalarLoss& loss);

// f(W0, x) + <grad_W f(W0, x), disp>.
absl::StatusOr<double> NtrfEval(const MlpParams& w0, const MlpParams& disp,
                                const Eigen::VectorXd& x);

struct NtrfFitOptions {
  double radius = 1.0;  // R; each layer of disp stays within R / sqrt(m)
  int64_t epochs = 10;
  int64_t batch_size = 32;
  double eta = 0.05;
};

struct NtrfFitResult {
  MlpParams disp;
  double train_loss = 0.0;
};

// Projected minibatch SGD on the convex NTRF objective over displacements.
absl::StatusOr<NtrfFitResult> NtrfFit(const MlpParams& w0, const Dataset& data,
                                      const ScalarLoss& loss,
                                      const NtrfFitOptions& options, Rng& rng);

}  // namespace dpnc

#endif  // DPNC_MLP_H_
