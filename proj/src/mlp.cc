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


#include "dpnc/mlp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/internal/norm_ball.h"
#include "dpnc/link_function.h"
#include "dpnc/logging.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

// Column-batched activations and backpropagated signals. hidden[l] is h_l
// for every selected sample (hidden[0] = inputs); deltas[l] is the signal
// multiplying hidden[l]^T in the gradient of layer l+1.
struct BatchPass {
  std::vector<Eigen::MatrixXd> hidden;
  std::vector<Eigen::MatrixXd> deltas;
  Eigen::RowVectorXd outputs;
};

Eigen::MatrixXd GatherColumns(const RowMatrix& features,
                              const std::vector<int64_t>& rows) {
  Eigen::MatrixXd out(features.cols(), static_cast<int64_t>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    out.col(static_cast<int64_t>(j)) = features.row(rows[j]).transpose();
  }
  return out;
}

void ForwardColumns(const MlpParams& params, Eigen::MatrixXd inputs,
                    BatchPass& pass) {
  const int64_t depth = params.depth();
  pass.hidden.clear();
  pass.hidden.reserve(depth);
  pass.hidden.push_back(std::move(inputs));
  for (int64_t l = 0; l + 1 < depth; ++l) {
    Eigen::MatrixXd z = params.layers[l] * pass.hidden.back();
    pass.hidden.push_back(z.cwiseMax(0.0));
  }
  const double scale = std::sqrt(static_cast<double>(params.width()));
  pass.outputs = scale * (params.layers.back() * pass.hidden.back());
}

// Fills pass.deltas given dloss/df for every column.
void BackwardColumns(const MlpParams& params,
                     const Eigen::RowVectorXd& output_grad, BatchPass& pass) {
  const int64_t depth = params.depth();
  const double scale = std::sqrt(static_cast<double>(params.width()));
  pass.deltas.assign(depth, Eigen::MatrixXd());
  pass.deltas[depth - 1] = scale * output_grad;
  for (int64_t l = depth - 2; l >= 0; --l) {
    Eigen::MatrixXd back =
        params.layers[l + 1].transpose() * pass.deltas[l + 1];
    // ReLU derivative at exactly 0 is taken as 0; h_{l+1} > 0 iff z > 0.
    pass.deltas[l] =
        back.cwiseProduct((pass.hidden[l + 1].array() > 0.0).cast<double>()
                              .matrix());
  }
}

absl::Status CheckInput(const MlpParams& params, int64_t dim) {
  if (dim != params.input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "network expects inputs of dimension ", params.input_dim(), ", got ",
        dim));
  }
  return absl::OkStatus();
}

MlpParams GradientFromPass(const MlpParams& params, const BatchPass& pass) {
  MlpParams grad;
  grad.layers.reserve(params.layers.size());
  for (int64_t l = 0; l < params.depth(); ++l) {
    grad.layers.push_back(pass.deltas[l] * pass.hidden[l].transpose());
  }
  return grad;
}

}  // namespace

MlpParams MlpParams::ZerosLike() const {
  MlpParams out;
  out.layers.reserve(layers.size());
  for (const auto& w : layers) {
    out.layers.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  return out;
}

double MlpParams::SquaredNorm() const {
  double total = 0.0;
  for (const auto& w : layers) total += w.squaredNorm();
  return total;
}

double MlpParams::Dot(const MlpParams& other) const {
  double total = 0.0;
  for (size_t l = 0; l < layers.size(); ++l) {
    total += layers[l].cwiseProduct(other.layers[l]).sum();
  }
  return total;
}

void MlpParams::AddScaled(const MlpParams& other, double scale) {
  for (size_t l = 0; l < layers.size(); ++l) {
    layers[l] += scale * other.layers[l];
  }
}

int64_t MlpParams::ParameterCount() const {
  int64_t total = 0;
  for (const auto& w : layers) total += w.size();
  return total;
}

absl::Status ValidateShapes(const MlpParams& params) {
  const int64_t depth = params.depth();
  if (depth < 2) {
    return absl::InvalidArgumentError("network needs at least 2 layers");
  }
  const int64_t m = params.width();
  if (m < 1 || params.input_dim() < 1) {
    return absl::InvalidArgumentError("width and input dimension must be >= 1");
  }
  for (int64_t l = 1; l + 1 < depth; ++l) {
    if (params.layers[l].rows() != m || params.layers[l].cols() != m) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer ", l + 1, " must be ", m, " x ", m));
    }
  }
  if (params.layers.back().rows() != 1 || params.layers.back().cols() != m) {
    return absl::InvalidArgumentError(
        absl::StrCat("output layer must be 1 x ", m));
  }
  return absl::OkStatus();
}

absl::Status CheckSameShape(const MlpParams& a, const MlpParams& b) {
  if (a.layers.size() != b.layers.size()) {
    return absl::InvalidArgumentError("networks differ in depth");
  }
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].rows() != b.layers[l].rows() ||
        a.layers[l].cols() != b.layers[l].cols()) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer ", l + 1, " shapes differ"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<MlpParams> InitParams(Rng& rng, int64_t depth, int64_t width,
                                     int64_t input_dim) {
  if (depth < 2 || width < 1 || input_dim < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need L >= 2, m >= 1, d >= 1; got L=", depth, " m=", width,
        " d=", input_dim));
  }
  const double m = static_cast<double>(width);
  MlpParams params;
  for (int64_t l = 0; l < depth; ++l) {
    const bool last = l + 1 == depth;
    const int64_t rows = last ? 1 : width;
    const int64_t cols = l == 0 ? input_dim : width;
    const double stddev = std::sqrt((last ? 1.0 : 2.0) / m);
    Eigen::MatrixXd w(rows, cols);
    for (int64_t i = 0; i < rows; ++i) {
      for (int64_t j = 0; j < cols; ++j) w(i, j) = stddev * rng.Gaussian();
    }
    params.layers.push_back(std::move(w));
  }
  return params;
}

absl::StatusOr<ForwardTrace> Forward(const MlpParams& params,
                                     const Eigen::VectorXd& x) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(params));
  DPNC_RETURN_IF_ERROR(CheckInput(params, x.size()));
  ForwardTrace trace;
  trace.hidden.push_back(x);
  for (int64_t l = 0; l + 1 < params.depth(); ++l) {
    Eigen::VectorXd z = params.layers[l] * trace.hidden.back();
    trace.masks.push_back((z.array() > 0.0).cast<double>().matrix());
    trace.hidden.push_back(z.cwiseMax(0.0));
  }
  trace.output = std::sqrt(static_cast<double>(params.width())) *
                 params.layers.back().row(0).dot(trace.hidden.back());
  return trace;
}

absl::StatusOr<Eigen::VectorXd> ForwardBatch(const MlpParams& params,
                                             const RowMatrix& features) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(params));
  DPNC_RETURN_IF_ERROR(CheckInput(params, features.cols()));
  BatchPass pass;
  ForwardColumns(params, features.transpose(), pass);
  return Eigen::VectorXd(pass.outputs.transpose());
}

double ScalarLoss::Value(double f, double y) const {
  switch (kind) {
    case LossKind::kLogistic:
      return Softplus(-y * f);
    case LossKind::kSquared: {
      const double r = std::clamp(f, -clamp, clamp) - y;
      return 0.5 * r * r;
    }
  }
  return 0.0;
}

double ScalarLoss::Derivative(double f, double y) const {
  switch (kind) {
    case LossKind::kLogistic: {
      // d/df softplus(-y f) = -y * sigmoid(-y f).
      const double z = -y * f;
      const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                : std::exp(z) / (1.0 + std::exp(z));
      return -y * s;
    }
    case LossKind::kSquared:
      if (f <= -clamp || f >= clamp) return 0.0;
      return f - y;
  }
  return 0.0;
}

absl::StatusOr<MlpParams> PerSampleGrad(const MlpParams& params,
                                        const Eigen::VectorXd& x, double y,
                                        const ScalarLoss& loss) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(params));
  DPNC_RETURN_IF_ERROR(CheckInput(params, x.size()));
  BatchPass pass;
  ForwardColumns(params, x, pass);
  Eigen::RowVectorXd g(1);
  g(0) = loss.Derivative(pass.outputs(0), y);
  BackwardColumns(params, g, pass);
  return GradientFromPass(params, pass);
}

absl::StatusOr<MlpParams> OutputGradient(const MlpParams& params,
                                         const Eigen::VectorXd& x) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(params));
  DPNC_RETURN_IF_ERROR(CheckInput(params, x.size()));
  BatchPass pass;
  ForwardColumns(params, x, pass);
  BackwardColumns(params, Eigen::RowVectorXd::Ones(1), pass);
  return GradientFromPass(params, pass);
}

MlpParams ProjectLayers(const MlpParams& params, double radius) {
  MlpParams out = params;
  for (auto& w : out.layers) internal::ProjectOntoBall(w, radius);
  return out;
}

absl::StatusOr<ClippedBatchGradient> ClippedGradientSum(
    const MlpParams& params, const RowMatrix& features,
    const Eigen::VectorXd& labels, const std::vector<int64_t>& rows,
    double clip, const ScalarLoss& loss) {
  DPNC_RETURN_IF_ERROR(CheckInput(params, features.cols()));
  if (!(clip > 0.0)) {
    return absl::InvalidArgumentError("clip bound must be positive");
  }
  ClippedBatchGradient out;
  if (rows.empty()) {
    out.sum = params.ZerosLike();
    return out;
  }
  BatchPass pass;
  ForwardColumns(params, GatherColumns(features, rows), pass);
  const int64_t b = static_cast<int64_t>(rows.size());
  Eigen::RowVectorXd g(b);
  for (int64_t j = 0; j < b; ++j) {
    g(j) = loss.Derivative(pass.outputs(j), labels(rows[j]));
  }
  BackwardColumns(params, g, pass);

  Eigen::ArrayXd norm_sq = Eigen::ArrayXd::Zero(b);
  for (int64_t l = 0; l < params.depth(); ++l) {
    norm_sq += pass.deltas[l].colwise().squaredNorm().transpose().array() *
               pass.hidden[l].colwise().squaredNorm().transpose().array();
  }
  Eigen::VectorXd scales(b);
  out.raw_norms.resize(b);
  out.clipped_norms.resize(b);
  for (int64_t j = 0; j < b; ++j) {
    const double norm = std::sqrt(norm_sq(j));
    scales(j) = ClipScale(norm, clip);
    if (scales(j) < 1.0) scales(j) *= 1.0 - kClipMargin;
    out.raw_norms[j] = norm;
    out.clipped_norms[j] = scales(j) * norm;
  }
  out.sum.layers.reserve(params.layers.size());
  for (int64_t l = 0; l < params.depth(); ++l) {
    out.sum.layers.push_back((pass.deltas[l] * scales.asDiagonal()) *
                             pass.hidden[l].transpose());
  }
  return out;
}

double DefaultDpSgdStep(int64_t depth, int64_t width, double radius,
                        double clip, int64_t iterations) {
  return std::sqrt(static_cast<double>(depth)) * radius /
         (clip * std::sqrt(static_cast<double>(width) *
                           static_cast<double>(iterations)));
}

absl::StatusOr<double> ValidateDpSgdConfig(const DpSgdConfig& cfg,
                                           int64_t n) {
  if (n < 1) return absl::InvalidArgumentError("dataset is empty");
  if (cfg.iterations < 1) {
    return absl::InvalidArgumentError("iterations T must be positive");
  }
  if (!(cfg.clip > 0.0)) {
    return absl::InvalidArgumentError("clip bound C must be positive");
  }
  if (!(cfg.radius > 0.0)) {
    return absl::InvalidArgumentError("radius R must be positive");
  }
  if (!(cfg.c2 > 0.0) || !(cfg.c1 > 0.0)) {
    return absl::InvalidArgumentError("c1 and c2 must be positive");
  }
  if (cfg.eta.has_value() && !(*cfg.eta > 0.0)) {
    return absl::InvalidArgumentError("learning rate must be positive");
  }
  if (cfg.noise_std_override.has_value() &&
      !(*cfg.noise_std_override >= 0.0)) {
    return absl::InvalidArgumentError("noise std must be nonnegative");
  }
  const double q = cfg.expected_batch / static_cast<double>(n);
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sampling rate q = M/n = ", q, " must lie in (0, 1]"));
  }
  if (q * static_cast<double>(n) < 1.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "q*n = ", q * static_cast<double>(n),
        " < 1; batches would almost always be empty"));
  }
  if (cfg.clip > cfg.radius) {
    Warn(absl::StrCat("clip C=", cfg.clip, " exceeds radius R=", cfg.radius));
  }
  return q;
}

absl::StatusOr<DpSgdResult> DpSgdTrain(const Dataset& data,
                                       const MlpParams& w0,
                                       const DpSgdConfig& cfg,
                                       const PrivacyBudget& budget,
                                       const ScalarLoss& loss,
                                       const RunControls& controls, Rng& rng,
                                       const DpSgdObserver* observer) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(w0));
  DPNC_RETURN_IF_ERROR(CheckInput(w0, data.dim()));
  DPNC_ASSIGN_OR_RETURN(const double q, ValidateDpSgdConfig(cfg, data.size()));
  const int64_t t_total = cfg.iterations;

  double eta;
  if (cfg.eta.has_value()) {
    eta = *cfg.eta;
  } else {
    eta = DefaultDpSgdStep(w0.depth(), w0.width(), cfg.radius, cfg.clip,
                           t_total);
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      return absl::InvalidArgumentError(
          "default learning rate is degenerate; set eta explicitly");
    }
  }

  // Std for a batch of one; the per-step std divides by |B_t|.
  double unit_std = 0.0;
  if (cfg.noise_std_override.has_value()) {
    unit_std = *cfg.noise_std_override;
  } else if (cfg.calibration == NoiseCalibration::kTheorem) {
    DPNC_ASSIGN_OR_RETURN(unit_std, DpsgdNoiseStd(q, cfg.clip, t_total, budget,
                                                  1, cfg.c2, cfg.c1));
  } else {
    DPNC_ASSIGN_OR_RETURN(unit_std,
                          StrictDpsgdNoiseStd(cfg.clip, t_total, budget, 1));
  }
  if (!std::isfinite(unit_std)) {
    return absl::InvalidArgumentError(
        "noise std is not finite (infinite clip needs a noise override)");
  }

  NoiseSource noise(rng, controls);
  const int64_t n = data.size();
  const int64_t params_count = w0.ParameterCount();
  MlpParams w = w0;
  DpSgdResult result;
  result.eta = eta;
  result.averaged = w0.ZerosLike();
  std::vector<int64_t> batch;
  batch.reserve(static_cast<size_t>(q * static_cast<double>(n) * 1.5) + 8);
  for (int64_t t = 1; t <= t_total; ++t) {
    batch.clear();
    for (int64_t i = 0; i < n; ++i) {
      if (rng.Bernoulli(q)) batch.push_back(i);
    }
    const int64_t size = static_cast<int64_t>(batch.size());
    if (observer != nullptr && observer->on_batch_size) {
      observer->on_batch_size(t, size);
    }
    if (size == 0) {
      ++result.empty_batches;
    } else {
      DPNC_ASSIGN_OR_RETURN(
          ClippedBatchGradient grads,
          ClippedGradientSum(w, data.features, data.labels, batch, cfg.clip,
                             loss));
      if (observer != nullptr && observer->on_batch) {
        observer->on_batch(t, grads);
      }
      const double bsize = static_cast<double>(size);
      const double std_t = unit_std / bsize;
      DPNC_ASSIGN_OR_RETURN(
          Eigen::VectorXd g_noise,
          noise.Draw(t, "dpsgd", cfg.clip / bsize, std_t, params_count));
      int64_t offset = 0;
      for (int64_t l = 0; l < w.depth(); ++l) {
        auto& layer = w.layers[l];
        const Eigen::Map<const Eigen::MatrixXd> noise_block(
            g_noise.data() + offset, layer.rows(), layer.cols());
        layer -= eta * (grads.sum.layers[l] / bsize + noise_block);
        internal::ProjectOntoBall(layer, cfg.radius);
        offset += layer.size();
      }
    }
    result.averaged.AddScaled(w, 1.0);
    if (observer != nullptr && observer->on_iterate) {
      observer->on_iterate(t, w);
    }
  }
  for (auto& layer : result.averaged.layers) {
    layer /= static_cast<double>(t_total);
  }
  result.last = std::move(w);
  return result;
}

absl::StatusOr<double> MeanLoss(const MlpParams& params, const Dataset& data,
                                const ScalarLoss& loss) {
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd outputs,
                        ForwardBatch(params, data.features));
  if (outputs.size() == 0) return absl::InvalidArgumentError("empty dataset");
  double total = 0.0;
  for (int64_t i = 0; i < outputs.size(); ++i) {
    total += loss.Value(outputs(i), data.labels(i));
  }
  return total / static_cast<double>(outputs.size());
}

absl::StatusOr<double> NtrfEval(const MlpParams& w0, const MlpParams& disp,
                                const Eigen::VectorXd& x) {
  DPNC_RETURN_IF_ERROR(CheckSameShape(w0, disp));
  DPNC_ASSIGN_OR_RETURN(ForwardTrace trace, Forward(w0, x));
  DPNC_ASSIGN_OR_RETURN(MlpParams grad, OutputGradient(w0, x));
  return trace.output + grad.Dot(disp);
}

absl::StatusOr<NtrfFitResult> NtrfFit(const MlpParams& w0,
                                      const Dataset& data,
                                      const ScalarLoss& loss,
                                      const NtrfFitOptions& options,
                                      Rng& rng) {
  DPNC_RETURN_IF_ERROR(ValidateShapes(w0));
  DPNC_RETURN_IF_ERROR(CheckInput(w0, data.dim()));
  if (!(options.radius >= 0.0) || options.epochs < 0 ||
      options.batch_size < 1 || !(options.eta > 0.0)) {
    return absl::InvalidArgumentError(
        "NTRF fit needs radius >= 0, epochs >= 0, batch >= 1 and eta > 0");
  }
  const int64_t n = data.size();
  if (n < 1) return absl::InvalidArgumentError("dataset is empty");
  const double layer_radius =
      options.radius / std::sqrt(static_cast<double>(w0.width()));

  // Features of the linearization at W0 for every sample.
  BatchPass base;
  ForwardColumns(w0, data.features.transpose(), base);
  BackwardColumns(w0, Eigen::RowVectorXd::Ones(n), base);
  const Eigen::RowVectorXd f0 = base.outputs;

  auto linearized = [&](const MlpParams& disp,
                        const std::vector<int64_t>& rows) {
    Eigen::VectorXd u(static_cast<int64_t>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j) u(j) = f0(rows[j]);
    for (int64_t l = 0; l < w0.depth(); ++l) {
      Eigen::MatrixXd h(base.hidden[l].rows(), u.size());
      Eigen::MatrixXd dl(base.deltas[l].rows(), u.size());
      for (size_t j = 0; j < rows.size(); ++j) {
        h.col(j) = base.hidden[l].col(rows[j]);
        dl.col(j) = base.deltas[l].col(rows[j]);
      }
      const Eigen::MatrixXd moved = disp.layers[l] * h;
      u += moved.cwiseProduct(dl).colwise().sum().transpose();
    }
    return u;
  };

  NtrfFitResult result;
  result.disp = w0.ZerosLike();
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int64_t> rows;
  if (layer_radius > 0.0) {
    for (int64_t epoch = 0; epoch < options.epochs; ++epoch) {
      for (int64_t i = n - 1; i > 0; --i) {
        const int64_t j = static_cast<int64_t>(
            rng.UniformInt(static_cast<uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
      }
      for (int64_t start = 0; start < n; start += options.batch_size) {
        const int64_t stop = std::min(n, start + options.batch_size);
        rows.assign(order.begin() + start, order.begin() + stop);
        const Eigen::VectorXd u = linearized(result.disp, rows);
        Eigen::VectorXd g(u.size());
        for (int64_t j = 0; j < u.size(); ++j) {
          g(j) = loss.Derivative(u(j), data.labels(rows[j]));
        }
        const double step = options.eta / static_cast<double>(u.size());
        for (int64_t l = 0; l < w0.depth(); ++l) {
          Eigen::MatrixXd h(base.hidden[l].rows(), u.size());
          Eigen::MatrixXd dl(base.deltas[l].rows(), u.size());
          for (size_t j = 0; j < rows.size(); ++j) {
            h.col(j) = base.hidden[l].col(rows[j]);
            dl.col(j) = base.deltas[l].col(rows[j]) * g(j);
          }
          result.disp.layers[l].noalias() -= step * (dl * h.transpose());
          internal::ProjectOntoBall(result.disp.layers[l], layer_radius);
        }
      }
    }
  }
  std::vector<int64_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const Eigen::VectorXd u = linearized(result.disp, all);
  double total = 0.0;
  for (int64_t i = 0; i < n; ++i) total += loss.Value(u(i), data.labels(i));
  result.train_loss = total / static_cast<double>(n);
  return result;
}

}  // namespace dpnc
