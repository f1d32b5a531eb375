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


#include "dpnc/synthetic_data.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dpnc/logging.h"
#include "dpnc/number_format.h"
#include "dpnc/status_macros.h"

namespace dpnc {
namespace {

constexpr double kBoundSlack = 1e-12;

double ClipLabel(double y, double bound, int64_t* truncated) {
  if (!std::isfinite(bound)) return y;
  if (y > bound) {
    ++*truncated;
    return bound;
  }
  if (y < -bound) {
    ++*truncated;
    return -bound;
  }
  return y;
}

void WarnOnHeavyTruncation(int64_t truncated, int64_t n) {
  if (2 * truncated > n) {
    Warn(absl::StrCat(truncated, " of ", n,
                      " labels were truncated to the label bound"));
  }
}

}  // namespace

absl::Status Dataset::Validate() const {
  if (labels.size() != features.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dataset has ", features.rows(), " rows but ", labels.size(),
        " labels"));
  }
  const double x_cap = feature_norm_bound * (1.0 + kBoundSlack);
  const double y_cap = label_bound * (1.0 + kBoundSlack);
  for (int64_t i = 0; i < features.rows(); ++i) {
    const double norm = features.row(i).norm();
    if (norm > x_cap) {
      return absl::FailedPreconditionError(absl::StrCat(
          "row ", i, " has norm ", norm, " above bound ", feature_norm_bound));
    }
    if (std::abs(labels(i)) > y_cap) {
      return absl::FailedPreconditionError(absl::StrCat(
          "label ", i, " = ", labels(i), " exceeds bound ", label_bound));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<GroundTruth> GroundTruth::Create(Eigen::VectorXd w_star,
                                                double norm_bound,
                                                double noise_std,
                                                ModelKind kind) {
  if (!(norm_bound > 0.0)) {
    return absl::InvalidArgumentError("norm bound W must be positive");
  }
  if (w_star.norm() > norm_bound * (1.0 + kBoundSlack)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "|w*| = ", w_star.norm(), " exceeds W = ", norm_bound));
  }
  if (!(noise_std >= 0.0)) {
    return absl::InvalidArgumentError("noise std must be nonnegative");
  }
  GroundTruth truth;
  truth.w_star = std::move(w_star);
  truth.norm_bound = norm_bound;
  truth.noise_std = noise_std;
  truth.kind = kind;
  return truth;
}

Eigen::VectorXd RandomVectorWithNorm(Rng& rng, int64_t d, double norm) {
  Eigen::VectorXd v = SampleUnitSphere(rng, d);
  return v * norm;
}

Eigen::VectorXd SampleUnitSphere(Rng& rng, int64_t d) {
  Eigen::VectorXd v(d);
  for (int64_t j = 0; j < d; ++j) v(j) = rng.Gaussian();
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

Eigen::VectorXd SampleScaledSphere(Rng& rng, int64_t d) {
  Eigen::VectorXd v = SampleUnitSphere(rng, d);
  return v * rng.Uniform01();
}

Eigen::VectorXd SampleIsotropicCube(Rng& rng, int64_t d) {
  const double half_width = std::sqrt(3.0);
  Eigen::VectorXd v(d);
  for (int64_t j = 0; j < d; ++j) {
    v(j) = half_width * (2.0 * rng.Uniform01() - 1.0);
  }
  return v;
}

Sampler WellSpecGlmSampler(const GroundTruth& truth, const LinkFunction& link,
                           double label_bound) {
  return [truth, link, label_bound](Rng& rng) {
    LabeledPoint p;
    p.x = SampleScaledSphere(rng, truth.w_star.size());
    const double noise = truth.noise_std * rng.Gaussian();
    int64_t ignored = 0;
    p.y = ClipLabel(link.Value(truth.w_star.dot(p.x)) + noise, label_bound,
                    &ignored);
    return p;
  };
}

absl::StatusOr<Dataset> GenWellSpecGlm(Rng& rng, int64_t n, int64_t d,
                                       const GroundTruth& truth,
                                       const LinkFunction& link,
                                       double label_bound) {
  if (n < 1 || d < 1) {
    return absl::InvalidArgumentError("n and d must be positive");
  }
  if (truth.w_star.size() != d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "w* has dimension ", truth.w_star.size(), ", expected ", d));
  }
  if (!(label_bound > 0.0)) {
    return absl::InvalidArgumentError("label bound must be positive");
  }
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  data.feature_norm_bound = 1.0;
  data.label_bound = label_bound;
  for (int64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = SampleScaledSphere(rng, d);
    const double noise = truth.noise_std * rng.Gaussian();
    data.features.row(i) = x.transpose();
    data.labels(i) = ClipLabel(link.Value(truth.w_star.dot(x)) + noise,
                               label_bound, &data.truncated);
  }
  WarnOnHeavyTruncation(data.truncated, n);
  return data;
}

absl::StatusOr<Dataset> GenWellSpecGlm(Rng& rng, int64_t n, int64_t d,
                                       const GroundTruth& truth,
                                       const LinkFunction& link) {
  return GenWellSpecGlm(rng, n, d, truth, link, link.range_bound());
}

absl::StatusOr<FeatureSample> GenLogConcaveFeatures(Rng& rng, int64_t n,
                                                    int64_t d) {
  if (n < 1 || d < 1) {
    return absl::InvalidArgumentError("n and d must be positive");
  }
  FeatureSample sample;
  sample.features.resize(n, d);
  sample.norm_bound = std::sqrt(3.0 * static_cast<double>(d));
  for (int64_t i = 0; i < n; ++i) {
    sample.features.row(i) = SampleIsotropicCube(rng, d).transpose();
  }
  return sample;
}

double MisspecifiedReluModel::Bias(const Eigen::VectorXd& x) const {
  const double s = std::sin(bias_direction.dot(x));
  const double sign = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
  return bias_amplitude * sign;
}

double MisspecifiedReluModel::CleanLabel(const Eigen::VectorXd& x) const {
  return std::max(0.0, truth.w_star.dot(x)) + Bias(x);
}

absl::StatusOr<MisspecifiedReluModel> MakeMisspecifiedReluModel(
    Rng& rng, GroundTruth truth, double bias_amplitude, double label_bound) {
  if (!(bias_amplitude >= 0.0)) {
    return absl::InvalidArgumentError("bias amplitude must be nonnegative");
  }
  if (!(label_bound > 0.0)) {
    return absl::InvalidArgumentError("label bound must be positive");
  }
  MisspecifiedReluModel model;
  model.bias_direction = SampleUnitSphere(rng, truth.w_star.size());
  model.truth = std::move(truth);
  model.truth.kind = ModelKind::kMisspecified;
  model.bias_amplitude = bias_amplitude;
  model.label_bound = label_bound;
  return model;
}

Sampler MisspecifiedReluSampler(const MisspecifiedReluModel& model) {
  return [model](Rng& rng) {
    LabeledPoint p;
    p.x = SampleIsotropicCube(rng, model.truth.w_star.size());
    const double noise = model.truth.noise_std * rng.Gaussian();
    int64_t ignored = 0;
    p.y = ClipLabel(model.CleanLabel(p.x) + noise, model.label_bound,
                    &ignored);
    return p;
  };
}

absl::StatusOr<Dataset> GenMisspecifiedRelu(
    Rng& rng, int64_t n, const MisspecifiedReluModel& model) {
  const int64_t d = model.truth.w_star.size();
  DPNC_ASSIGN_OR_RETURN(FeatureSample features,
                        GenLogConcaveFeatures(rng, n, d));
  Dataset data;
  data.features = std::move(features.features);
  data.feature_norm_bound = features.norm_bound;
  data.label_bound = model.label_bound;
  data.labels.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = data.features.row(i).transpose();
    const double noise = model.truth.noise_std * rng.Gaussian();
    data.labels(i) =
        ClipLabel(model.CleanLabel(x) + noise, model.label_bound,
                  &data.truncated);
  }
  WarnOnHeavyTruncation(data.truncated, n);
  return data;
}

absl::StatusOr<TwoLayerTruth> TwoLayerTruth::Create(RowMatrix hidden,
                                                    Eigen::VectorXd output,
                                                    LinkFunction inner,
                                                    LinkFunction outer) {
  if (hidden.rows() != output.size() || hidden.rows() < 1) {
    return absl::InvalidArgumentError(
        "hidden weights must have one row per output weight");
  }
  for (int64_t t = 0; t < hidden.rows(); ++t) {
    if (std::abs(hidden.row(t).norm() - 1.0) > 1e-9) {
      return absl::InvalidArgumentError(
          absl::StrCat("hidden unit ", t, " does not have unit norm"));
    }
  }
  if (std::abs(output.norm() - 1.0) > 1e-9) {
    return absl::InvalidArgumentError("output weights must have unit norm");
  }
  TwoLayerTruth truth;
  truth.hidden = std::move(hidden);
  truth.output = std::move(output);
  truth.inner = std::move(inner);
  truth.outer = std::move(outer);
  return truth;
}

TwoLayerTruth TwoLayerTruth::Random(Rng& rng, int64_t k, int64_t d,
                                    LinkFunction inner, LinkFunction outer) {
  TwoLayerTruth truth;
  truth.hidden.resize(k, d);
  for (int64_t t = 0; t < k; ++t) {
    truth.hidden.row(t) = SampleUnitSphere(rng, d).transpose();
  }
  truth.output = SampleUnitSphere(rng, k);
  truth.inner = std::move(inner);
  truth.outer = std::move(outer);
  return truth;
}

double TwoLayerTruth::Evaluate(const Eigen::VectorXd& x) const {
  double pre = 0.0;
  for (int64_t t = 0; t < hidden.rows(); ++t) {
    pre += output(t) * inner.Value(hidden.row(t).dot(x));
  }
  return outer.Value(pre);
}

Sampler TwoLayerSampler(const TwoLayerTruth& truth, double noise_std) {
  return [truth, noise_std](Rng& rng) {
    LabeledPoint p;
    p.x = SampleUnitSphere(rng, truth.dim());
    const double noise = noise_std * rng.Gaussian();
    p.y = std::clamp(truth.Evaluate(p.x) + noise, 0.0, 1.0);
    return p;
  };
}

absl::StatusOr<Dataset> GenTwoLayer(Rng& rng, int64_t n,
                                    const TwoLayerTruth& truth,
                                    double noise_std) {
  if (n < 1) return absl::InvalidArgumentError("n must be positive");
  if (!(noise_std >= 0.0)) {
    return absl::InvalidArgumentError("noise std must be nonnegative");
  }
  Dataset data;
  data.features.resize(n, truth.dim());
  data.labels.resize(n);
  data.feature_norm_bound = 1.0;
  data.label_bound = 1.0;
  for (int64_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = SampleUnitSphere(rng, truth.dim());
    const double noise = noise_std * rng.Gaussian();
    const double raw = truth.Evaluate(x) + noise;
    const double y = std::clamp(raw, 0.0, 1.0);
    if (y != raw) ++data.truncated;
    data.features.row(i) = x.transpose();
    data.labels(i) = y;
  }
  return data;
}

Sampler TeacherClassificationSampler(const TwoLayerTruth& teacher,
                                     double flip_prob) {
  return [teacher, flip_prob](Rng& rng) {
    LabeledPoint p;
    p.x = SampleUnitSphere(rng, teacher.dim());
    const double sign = teacher.Evaluate(p.x) >= 0.0 ? 1.0 : -1.0;
    p.y = rng.Bernoulli(flip_prob) ? -sign : sign;
    return p;
  };
}

absl::StatusOr<Dataset> GenTeacherClassification(Rng& rng, int64_t n,
                                                 const TwoLayerTruth& teacher,
                                                 double flip_prob) {
  if (n < 1) return absl::InvalidArgumentError("n must be positive");
  if (!(flip_prob >= 0.0 && flip_prob <= 0.5)) {
    return absl::InvalidArgumentError(
        absl::StrCat("flip probability must lie in [0, 0.5], got ", flip_prob));
  }
  return DrawDataset(rng, n, teacher.dim(),
                     TeacherClassificationSampler(teacher, flip_prob), 1.0,
                     1.0);
}

Dataset DrawDataset(Rng& rng, int64_t n, int64_t d, const Sampler& source,
                    double feature_norm_bound, double label_bound) {
  Dataset data;
  data.features.resize(n, d);
  data.labels.resize(n);
  data.feature_norm_bound = feature_norm_bound;
  data.label_bound = label_bound;
  for (int64_t i = 0; i < n; ++i) {
    LabeledPoint p = source(rng);
    data.features.row(i) = p.x.transpose();
    data.labels(i) = p.y;
  }
  return data;
}

absl::Status WriteDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError("cannot open " + path);
  for (int64_t j = 0; j < data.dim(); ++j) out << "x_" << j << ',';
  out << "y\n";
  for (int64_t i = 0; i < data.size(); ++i) {
    for (int64_t j = 0; j < data.dim(); ++j) {
      out << FormatShortest(data.features(i, j)) << ',';
    }
    out << FormatShortest(data.labels(i)) << '\n';
  }
  out.flush();
  if (!out) return absl::DataLossError("write failed for " + path);
  return absl::OkStatus();
}

absl::StatusOr<Dataset> ReadDatasetCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(path + ": missing header");
  }
  const std::vector<std::string> header = absl::StrSplit(line, ',');
  if (header.empty() || header.back() != "y") {
    return absl::InvalidArgumentError(path + ": header must end with y");
  }
  const int64_t d = static_cast<int64_t>(header.size()) - 1;
  for (int64_t j = 0; j < d; ++j) {
    if (header[j] != absl::StrCat("x_", j)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": unexpected column ", header[j]));
    }
  }
  std::vector<double> values;
  int64_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (static_cast<int64_t>(cells.size()) != d + 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": row ", rows, " has ", cells.size(),
                       " cells, expected ", d + 1));
    }
    for (absl::string_view cell : cells) {
      DPNC_ASSIGN_OR_RETURN(const double v, ParseDouble(std::string_view(cell.data(), cell.size())));
      values.push_back(v);
    }
    ++rows;
  }
  Dataset data;
  data.features.resize(rows, d);
  data.labels.resize(rows);
  double max_norm = 0.0;
  double max_label = 0.0;
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < d; ++j) {
      data.features(i, j) = values[i * (d + 1) + j];
    }
    data.labels(i) = values[i * (d + 1) + d];
    max_norm = std::max(max_norm, data.features.row(i).norm());
    max_label = std::max(max_label, std::abs(data.labels(i)));
  }
  data.feature_norm_bound = max_norm;
  data.label_bound = max_label;
  return data;
}

}  // namespace dpnc
