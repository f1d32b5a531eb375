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


#include "dpnc/two_layer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/logging.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

// Maclaurin series of the logistic function from s' = s (1 - s).
std::vector<double> SigmoidSeries(int64_t degree) {
  std::vector<double> a(degree + 1, 0.0);
  a[0] = 0.5;
  for (int64_t k = 0; k < degree; ++k) {
    double square = 0.0;
    for (int64_t i = 0; i <= k; ++i) square += a[i] * a[k - i];
    a[k + 1] = (a[k] - square) / static_cast<double>(k + 1);
  }
  return a;
}

// Maclaurin series of tanh from t' = 1 - t^2.
std::vector<double> TanhSeries(int64_t degree) {
  std::vector<double> a(degree + 1, 0.0);
  for (int64_t k = 0; k < degree; ++k) {
    double square = 0.0;
    for (int64_t i = 0; i <= k; ++i) square += a[i] * a[k - i];
    a[k + 1] = ((k == 0 ? 1.0 : 0.0) - square) / static_cast<double>(k + 1);
  }
  return a;
}

}  // namespace

absl::StatusOr<FeatureMap> MultinomialFeatureMap(int64_t d, int64_t degree,
                                                 std::vector<double> coeffs,
                                                 int64_t cap) {
  if (d < 1 || degree < 0) {
    return absl::InvalidArgumentError("need d >= 1 and degree >= 0");
  }
  if (static_cast<int64_t>(coeffs.size()) != degree + 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", degree + 1, " coefficients, got ", coeffs.size()));
  }
  double total = 1.0;
  double power = 1.0;
  for (int64_t j = 1; j <= degree; ++j) {
    power *= static_cast<double>(d);
    total += power;
  }
  if (total > static_cast<double>(cap)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature map needs D_m = ",
        total < 9e15 ? absl::StrCat(static_cast<int64_t>(total))
                     : absl::StrCat(total),
        " coordinates, above the cap ", cap));
  }
  double sum_sq = 0.0;
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      return absl::InvalidArgumentError("coefficients must be finite");
    }
    sum_sq += c * c;
  }
  if (!(sum_sq > 0.0)) {
    return absl::InvalidArgumentError("coefficients must not all be zero");
  }
  FeatureMap map;
  map.input_dim_ = d;
  map.output_dim_ = static_cast<int64_t>(total);
  map.coeffs_ = std::move(coeffs);
  map.normalizer_ = std::sqrt(sum_sq);
  return map;
}

absl::StatusOr<Eigen::VectorXd> FeatureMap::Apply(
    const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature map expects dimension ", input_dim_, ", got ", x.size()));
  }
  Eigen::VectorXd out(output_dim_);
  Eigen::VectorXd power = Eigen::VectorXd::Ones(1);
  int64_t offset = 0;
  for (size_t j = 0; j < coeffs_.size(); ++j) {
    if (j > 0) {
      Eigen::VectorXd next(power.size() * input_dim_);
      for (int64_t i = 0; i < power.size(); ++i) {
        next.segment(i * input_dim_, input_dim_) = power(i) * x;
      }
      power = std::move(next);
    }
    out.segment(offset, power.size()) = (coeffs_[j] / normalizer_) * power;
    offset += power.size();
  }
  return out;
}

absl::StatusOr<RowMatrix> FeatureMap::ApplyRows(
    const RowMatrix& features) const {
  RowMatrix out(features.rows(), output_dim_);
  for (int64_t i = 0; i < features.rows(); ++i) {
    DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd row,
                          Apply(features.row(i).transpose()));
    out.row(i) = row.transpose();
  }
  return out;
}

double FeatureMap::Kernel(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& xp) const {
  const double inner = x.dot(xp);
  double total = 0.0;
  double power = 1.0;
  for (size_t j = 0; j < coeffs_.size(); ++j) {
    const double c = coeffs_[j] / normalizer_;
    total += c * c * power;
    power *= inner;
  }
  return total;
}

absl::StatusOr<std::vector<double>> TaylorCoefficients(
    const LinkFunction& link, int64_t degree) {
  if (degree < 0) return absl::InvalidArgumentError("degree must be >= 0");
  const std::string& name = link.name();
  if (name == "sigmoid") return SigmoidSeries(degree);
  if (name == "tanh") return TanhSeries(degree);
  if (name == "identity") {
    std::vector<double> a(degree + 1, 0.0);
    if (degree >= 1) a[1] = 1.0;
    return a;
  }
  if (name == "relu") {
    // softplus' = sigmoid, softplus(0) = ln 2.
    const std::vector<double> s = SigmoidSeries(degree);
    std::vector<double> a(degree + 1, 0.0);
    a[0] = std::numbers::ln2;
    for (int64_t k = 1; k <= degree; ++k) {
      a[k] = s[k - 1] / static_cast<double>(k);
    }
    return a;
  }
  return absl::UnimplementedError(absl::StrCat(
      "no series expansion for link ", name, "; pass coefficients explicitly"));
}

absl::StatusOr<int64_t> DegreeForAccuracy(ApproxKind kind, double alpha,
                                          double c_deg) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (!(c_deg > 0.0)) {
    return absl::InvalidArgumentError("degree multiplier must be positive");
  }
  const double raw = kind == ApproxKind::kSigmoid
                         ? c_deg * std::log(1.0 / alpha)
                         : c_deg / alpha;
  const double nearest = std::round(raw);
  const double snapped =
      std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest
                                                           : std::ceil(raw);
  return static_cast<int64_t>(snapped);
}

absl::StatusOr<double> KernelModel::Predict(const Eigen::VectorXd& x) const {
  DPNC_ASSIGN_OR_RETURN(Eigen::VectorXd features, map.Apply(x));
  if (features.size() != w.size()) {
    return absl::InvalidArgumentError("model and feature map disagree");
  }
  return outer.Value(w.dot(features));
}

absl::StatusOr<GlmPath> SelectTwoLayerPath(double epsilon, double theta,
                                           int64_t n) {
  if (!(theta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rank bound theta must be positive, got ", theta));
  }
  if (n < 1) return absl::InvalidArgumentError("n must be positive");
  return epsilon > theta / static_cast<double>(n) ? GlmPath::kPhased
                                                  : GlmPath::kProjected;
}

absl::StatusOr<TwoLayerResult> DpTwoLayer(const Dataset& data,
                                          const FeatureMap& map,
                                          const LinkFunction& outer,
                                          const PrivacyBudget& budget,
                                          double theta,
                                          const PhasedSgdOptions& options,
                                          Rng& rng) {
  if (data.dim() != map.input_dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "data has dimension ", data.dim(), " but the feature map expects ",
        map.input_dim()));
  }
  DPNC_ASSIGN_OR_RETURN(const GlmPath path,
                        SelectTwoLayerPath(budget.epsilon(), theta,
                                           data.size()));
  Dataset mapped;
  DPNC_ASSIGN_OR_RETURN(mapped.features, map.ApplyRows(data.features));
  mapped.labels = data.labels;
  mapped.feature_norm_bound = 1.0;
  mapped.label_bound = data.label_bound;

  const int64_t n = data.size();
  const double cap = 1.0 / outer.lipschitz();
  const int64_t m = DefaultProjectionDim(n, budget, 1.0);
  const double rank = path == GlmPath::kPhased
                          ? theta
                          : static_cast<double>(
                                std::min<int64_t>(m, map.output_dim()));
  PhasedSgdOptions resolved = options;
  double eta = options.eta.has_value()
                   ? *options.eta * options.eta_multiplier
                   : DefaultPhasedStep(n, budget, rank, options.eta_multiplier,
                                       std::numeric_limits<double>::infinity());
  if (eta > cap) {
    Warn(absl::StrCat("step ", eta, " exceeds 1/G = ", cap, "; using 1/G"));
    eta = cap;
  }
  resolved.eta = eta;
  resolved.eta_multiplier = 1.0;

  TwoLayerResult result;
  result.path = path;
  ModelVector model;
  if (path == GlmPath::kPhased) {
    DPNC_ASSIGN_OR_RETURN(model,
                          PhasedSgd(mapped, outer, budget, resolved, rng));
  } else {
    DPNC_ASSIGN_OR_RETURN(
        model, ProjectedPhasedSgd(mapped, outer, budget, resolved, m, rng));
  }
  result.model = KernelModel{model.Lifted(), map, outer};
  return result;
}

}  // namespace dpnc
