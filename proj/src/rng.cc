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

#include "dpnc/rng.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpnc {
namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed), key_(Mix64(seed)) {}

uint64_t Rng::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGolden);
}

double Rng::Uniform01() {
  // 53 random bits, shifted by half an ulp so 0 and 1 are never produced.
  return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t bound) {
  const unsigned __int128 product =
      static_cast<unsigned __int128>(NextU64()) * bound;
  return static_cast<uint64_t>(product >> 64);
}

bool Rng::Bernoulli(double p) { return Uniform01() < p; }

double Rng::Gaussian() {
  const double u1 = Uniform01();
  const double u2 = Uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::Fork(uint64_t stream) const { return Rng(MixSeed(seed_, stream)); }

uint64_t MixSeed(uint64_t a, uint64_t b) {
  return Mix64(Mix64(a) ^ (b + kGolden + (a << 6) + (a >> 2)));
}

absl::StatusOr<Eigen::VectorXd> GaussianVector(Rng& rng, int64_t dim,
                                               double stddev) {
  if (dim <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("GaussianVector: dim must be positive, got ", dim));
  }
  if (!(stddev >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("GaussianVector: stddev must be nonnegative, got ", stddev));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  AddGaussianNoise(rng, stddev, std::span<double>(out.data(), out.size()));
  return out;
}

void AddGaussianNoise(Rng& rng, double stddev, std::span<double> out) {
  for (double& v : out) v += stddev * rng.Gaussian();
}

JlMatrix JlMatrix::Identity(int64_t d) {
  return JlMatrix(d, d, /*identity=*/true, Eigen::MatrixXd());
}

JlMatrix JlMatrix::FromMatrix(Eigen::MatrixXd matrix) {
  const int64_t rows = matrix.rows();
  const int64_t cols = matrix.cols();
  return JlMatrix(rows, cols, /*identity=*/false, std::move(matrix));
}

absl::StatusOr<JlMatrix> SampleJl(Rng& rng, int64_t m, int64_t d) {
  if (m < 1 || d < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("SampleJl: need m >= 1 and d >= 1, got m=", m, " d=", d));
  }
  if (m >= d) return JlMatrix::Identity(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd entries(m, d);
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < d; ++j) entries(i, j) = scale * rng.Gaussian();
  }
  return JlMatrix::FromMatrix(std::move(entries));
}

absl::StatusOr<Eigen::VectorXd> JlProject(const JlMatrix& phi,
                                          const Eigen::VectorXd& x) {
  if (x.size() != phi.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "JlProject: expected length ", phi.cols(), ", got ", x.size()));
  }
  if (phi.is_identity()) return x;
  return Eigen::VectorXd(phi.matrix() * x);
}

absl::StatusOr<Eigen::VectorXd> JlLift(const JlMatrix& phi,
                                       const Eigen::VectorXd& w) {
  if (w.size() != phi.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "JlLift: expected length ", phi.rows(), ", got ", w.size()));
  }
  if (phi.is_identity()) return w;
  return Eigen::VectorXd(phi.matrix().transpose() * w);
}

absl::StatusOr<RowMatrix> JlProjectRows(const JlMatrix& phi,
                                        const RowMatrix& features) {
  if (features.cols() != phi.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "JlProjectRows: expected ", phi.cols(), " columns, got ",
        features.cols()));
  }
  if (phi.is_identity()) return features;
  return RowMatrix(features * phi.matrix().transpose());
}

}  // namespace dpnc
