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

#include "dpnc/link_function.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr int kQuadratureMaxDepth = 48;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimpsonState {
  const LinkFunction::ScalarFn* f;
  int64_t evaluations = 0;
  double worst_residual = 0.0;
  bool converged = true;
};

double SimpsonRule(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double AdaptiveSimpson(SimpsonState& s, double a, double fa, double b,
                       double fb, double m, double fm, double whole,
                       double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*s.f)(lm);
  const double frm = (*s.f)(rm);
  s.evaluations += 2;
  const double left = SimpsonRule(a, fa, m, fm, flm);
  const double right = SimpsonRule(m, fm, b, fb, frm);
  const double residual = left + right - whole;
  if (std::abs(residual) <= 15.0 * tol) {
    return left + right + residual / 15.0;
  }
  if (depth <= 0) {
    s.converged = false;
    s.worst_residual = std::max(s.worst_residual, std::abs(residual));
    return left + right + residual / 15.0;
  }
  return AdaptiveSimpson(s, a, fa, m, fm, lm, flm, left, 0.5 * tol,
                         depth - 1) +
         AdaptiveSimpson(s, m, fm, b, fb, rm, frm, right, 0.5 * tol,
                         depth - 1);
}

absl::StatusOr<double> Integrate(const LinkFunction::ScalarFn& f, double a,
                                 double b) {
  if (a == b) return 0.0;
  SimpsonState state{&f};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = SimpsonRule(a, fa, b, fb, fm);
  const double result = AdaptiveSimpson(state, a, fa, b, fb, m, fm, whole,
                                        kQuadratureTolerance,
                                        kQuadratureMaxDepth);
  if (!state.converged || !std::isfinite(result)) {
    return absl::InternalError(absl::StrCat(
        "quadrature did not converge on [", a, ", ", b,
        "]; residual=", state.worst_residual));
  }
  return result;
}

absl::Status CheckDims(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  if (w.size() != x.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: w has ", w.size(), ", x has ", x.size()));
  }
  return absl::OkStatus();
}

}  // namespace

double Softplus(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

LinkFunction LinkFunction::Sigmoid() {
  return LinkFunction(Kind::kSigmoid, "sigmoid", 0.25, 1.0, true);
}

LinkFunction LinkFunction::Tanh() {
  return LinkFunction(Kind::kTanh, "tanh", 1.0, 1.0, true);
}

LinkFunction LinkFunction::Relu() {
  return LinkFunction(Kind::kRelu, "relu", 1.0, kInf, true);
}

LinkFunction LinkFunction::Identity() {
  return LinkFunction(Kind::kIdentity, "identity", 1.0, kInf, true);
}

LinkFunction LinkFunction::Custom(std::string name, ScalarFn value,
                                  ScalarFn derivative, double lipschitz,
                                  double range_bound,
                                  bool has_subgradient_everywhere) {
  LinkFunction link(Kind::kCustom, std::move(name), lipschitz, range_bound,
                    has_subgradient_everywhere);
  link.value_ = std::move(value);
  link.derivative_ = std::move(derivative);
  return link;
}

double LinkFunction::Value(double z) const {
  switch (kind_) {
    case Kind::kSigmoid:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                      : std::exp(z) / (1.0 + std::exp(z));
    case Kind::kTanh:
      return std::tanh(z);
    case Kind::kRelu:
      return z > 0.0 ? z : 0.0;
    case Kind::kIdentity:
      return z;
    case Kind::kCustom:
      return value_(z);
  }
  return 0.0;
}

double LinkFunction::Derivative(double z) const {
  switch (kind_) {
    case Kind::kSigmoid: {
      const double s = Value(z);
      return s * (1.0 - s);
    }
    case Kind::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Kind::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Kind::kIdentity:
      return 1.0;
    case Kind::kCustom:
      return derivative_(z);
  }
  return 0.0;
}

absl::StatusOr<double> LinkFunction::Antiderivative(double a) const {
  switch (kind_) {
    case Kind::kSigmoid:
      return Softplus(a) - std::numbers::ln2;
    case Kind::kTanh: {
      // ln cosh a = |a| + log1p(e^{-2|a|}) - ln 2.
      const double abs_a = std::abs(a);
      return abs_a + std::log1p(std::exp(-2.0 * abs_a)) - std::numbers::ln2;
    }
    case Kind::kRelu:
      return a > 0.0 ? 0.5 * a * a : 0.0;
    case Kind::kIdentity:
      return 0.5 * a * a;
    case Kind::kCustom:
      return Integrate(value_, 0.0, a);
  }
  return 0.0;
}

absl::StatusOr<LinkFunction> LinkByName(std::string_view name) {
  if (name == "sigmoid") return LinkFunction::Sigmoid();
  if (name == "tanh") return LinkFunction::Tanh();
  if (name == "relu") return LinkFunction::Relu();
  return absl::InvalidArgumentError(
      absl::StrCat("unknown link function \"", std::string(name),
                   "\"; expected sigmoid, tanh or relu"));
}

absl::StatusOr<double> SurrogateLoss(const LinkFunction& link,
                                     const Eigen::VectorXd& w,
                                     const Eigen::VectorXd& x, double y) {
  DPNC_RETURN_IF_ERROR(CheckDims(w, x));
  const double margin = w.dot(x);
  DPNC_ASSIGN_OR_RETURN(const double area, link.Antiderivative(margin));
  return area - y * margin;
}

absl::StatusOr<Eigen::VectorXd> SurrogateGrad(const LinkFunction& link,
                                              const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& x,
                                              double y) {
  DPNC_RETURN_IF_ERROR(CheckDims(w, x));
  return Eigen::VectorXd((link.Value(w.dot(x)) - y) * x);
}

absl::StatusOr<RiskEstimate> PopulationRiskMc(const Predictor& predict,
                                              const Sampler& source,
                                              int64_t n_test, Rng& rng) {
  if (n_test < 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_test must be at least 100, got ", n_test));
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t i = 0; i < n_test; ++i) {
    const LabeledPoint p = source(rng);
    const double r = predict(p.x) - p.y;
    const double loss = r * r;
    sum += loss;
    sum_sq += loss * loss;
  }
  const double n = static_cast<double>(n_test);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return RiskEstimate{mean, std::sqrt(var / n)};
}

absl::StatusOr<RiskEstimate> ExcessRiskMc(const Predictor& model,
                                          const Predictor& reference,
                                          const Sampler& source,
                                          int64_t n_test, Rng& rng) {
  if (n_test < 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_test must be at least 100, got ", n_test));
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t i = 0; i < n_test; ++i) {
    const LabeledPoint p = source(rng);
    const double a = model(p.x) - p.y;
    const double b = reference(p.x) - p.y;
    const double diff = a * a - b * b;
    sum += diff;
    sum_sq += diff * diff;
  }
  const double n = static_cast<double>(n_test);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return RiskEstimate{mean, std::sqrt(var / n)};
}

}  // namespace dpnc
