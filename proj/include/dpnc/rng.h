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

#ifndef DPNC_RNG_H_
#define DPNC_RNG_H_

#include <cstdint>
#include <span>

#include "Eigen/Dense"
#include "absl/status/statusor.h"

namespace dpnc {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Counter-based pseudo random generator.
//
// The n-th 64-bit output is a pure function of (seed, n):
//   out(n) = Mix64(Mix64(seed) + (n + 1) * 0x9E3779B97F4A7C15)
// where Mix64 is the SplitMix64 finalizer. Every draw advances the counter by
// a fixed amount so the stream position after any operation is auditable:
//
//   NextU64, Uniform01, UniformInt, Bernoulli   1 step
//   Gaussian                                    2 steps (Box-Muller, cosine)
//
// Not thread-safe; each run owns its generator.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t NextU64();

  // Uniform on the open interval (0, 1).
  double Uniform01();

  // Uniform integer in [0, bound). bound must be positive.
  uint64_t UniformInt(uint64_t bound);

  bool Bernoulli(double p);

  // Standard normal variate.
  double Gaussian();

  uint64_t seed() const { return seed_; }
  uint64_t position() const { return counter_; }

  // Generator for an independent sub-stream, derived only from (seed, stream).
  Rng Fork(uint64_t stream) const;

 private:
  uint64_t seed_;
  uint64_t key_;
  uint64_t counter_ = 0;
};

// Stateless 64-bit mixer used to derive seeds from tuples of integers.
uint64_t MixSeed(uint64_t a, uint64_t b);

// Vector of `dim` i.i.d. N(0, stddev^2) samples. The stream advances by
// 2 * dim steps regardless of stddev (stddev == 0 yields exact zeros).
absl::StatusOr<Eigen::VectorXd> GaussianVector(Rng& rng, int64_t dim,
                                               double stddev);

// In-place variant: out[i] += stddev * N(0, 1). Same stream consumption.
void AddGaussianNoise(Rng& rng, double stddev, std::span<double> out);

// Johnson-Lindenstrauss projection. When the requested target dimension is
// not smaller than the source dimension the identity map is used instead and
// `is_identity()` reports it.
class JlMatrix {
 public:
  static JlMatrix Identity(int64_t d);
  static JlMatrix FromMatrix(Eigen::MatrixXd matrix);

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  bool is_identity() const { return identity_; }
  // Dense entries; empty when is_identity().
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  JlMatrix(int64_t rows, int64_t cols, bool identity, Eigen::MatrixXd matrix)
      : rows_(rows), cols_(cols), identity_(identity),
        matrix_(std::move(matrix)) {}

  int64_t rows_;
  int64_t cols_;
  bool identity_;
  Eigen::MatrixXd matrix_;
};

// m x d matrix with i.i.d. N(0, 1/m) entries (row-major draw order), or the
// d x d identity when m >= d (no randomness consumed in that case).
absl::StatusOr<JlMatrix> SampleJl(Rng& rng, int64_t m, int64_t d);

// Phi x.
absl::StatusOr<Eigen::VectorXd> JlProject(const JlMatrix& phi,
                                          const Eigen::VectorXd& x);

// Phi^T w.
absl::StatusOr<Eigen::VectorXd> JlLift(const JlMatrix& phi,
                                       const Eigen::VectorXd& w);

// Projects every row of `features` (n x d) to an n x m matrix.
absl::StatusOr<RowMatrix> JlProjectRows(const JlMatrix& phi,
                                        const RowMatrix& features);

}  // namespace dpnc

#endif  // DPNC_RNG_H_
