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

// Noise calibration, gradient clipping and the noise audit log.

#ifndef DPNC_PRIVACY_H_
#define DPNC_PRIVACY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/rng.h"

namespace dpnc {

// (epsilon, delta) pair. epsilon > 1 is accepted with a warning.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  PrivacyBudget(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}

  double epsilon_;
  double delta_;
};

// Standard deviation of the Gaussian mechanism:
//   sqrt(2 * sensitivity^2 * ln(1.25 / delta)) / epsilon.
absl::StatusOr<double> GaussianMechanismStd(double sensitivity,
                                            const PrivacyBudget& budget);

// Multiplier 1 / max(1, norm / clip) applied by ClipToNorm.
double ClipScale(double norm, double clip);

// g / max(1, |g|_2 / clip).
absl::StatusOr<Eigen::VectorXd> ClipToNorm(const Eigen::VectorXd& g,
                                           double clip);

// Per-iteration DP-SGD noise std c2 * q * C * sqrt(T ln(1/delta)) / (|B| eps).
// Warns when epsilon >= c1 * q^2 * T, outside the regime of the guarantee.
absl::StatusOr<double> DpsgdNoiseStd(double sampling_rate, double clip,
                                     int64_t iterations,
                                     const PrivacyBudget& budget,
                                     int64_t batch_size, double c2,
                                     double c1 = 1.0);

// Strict calibration: splits (eps, delta) over `iterations` Gaussian-mechanism
// releases by advanced composition (delta/2 for the composition slack, the
// rest divided evenly) and calibrates each release for sensitivity
// 2 * clip / batch_size.
absl::StatusOr<double> StrictDpsgdNoiseStd(double clip, int64_t iterations,
                                           const PrivacyBudget& budget,
                                           int64_t batch_size);

// Per-release epsilon such that `iterations` releases compose to `epsilon`
// under advanced composition with slack `delta_slack`.
double AdvancedCompositionEpsilon(double epsilon, int64_t iterations,
                                  double delta_slack);

// One recorded noise injection.
struct NoiseEvent {
  int64_t iteration = 0;
  std::string mechanism;
  // Sensitivity (or clip bound) the std was derived from.
  double sensitivity = 0.0;
  double stddev = 0.0;
  int64_t dimension = 0;
};

// Append-only log of injections for one run.
class NoiseLog {
 public:
  void Append(NoiseEvent event) { events_.push_back(std::move(event)); }
  const std::vector<NoiseEvent>& events() const { return events_; }
  size_t size() const { return events_.size(); }
  void Clear() { events_.clear(); }

 private:
  std::vector<NoiseEvent> events_;
};

enum class NoiseMode {
  kLive,
  // Records every event and consumes the stream identically, but the returned
  // noise is exactly zero. Used for non-private reference runs.
  kZero,
};

// Optional per-run wiring shared by all training algorithms.
struct RunControls {
  NoiseMode noise_mode = NoiseMode::kLive;
  NoiseLog* noise_log = nullptr;
};

// The single route for every noise injection in the library. Draws through
// GaussianVector and appends a NoiseEvent per call.
class NoiseSource {
 public:
  NoiseSource(Rng& rng, const RunControls& controls)
      : rng_(rng), controls_(controls) {}

  absl::StatusOr<Eigen::VectorXd> Draw(int64_t iteration,
                                       std::string_view mechanism,
                                       double sensitivity, double stddev,
                                       int64_t dimension);

  // Adds noise to `target` in place; used for large parameter blocks.
  void AddTo(int64_t iteration, std::string_view mechanism,
             double sensitivity, double stddev, std::span<double> target);

  NoiseMode mode() const { return controls_.noise_mode; }

 private:
  void Record(int64_t iteration, std::string_view mechanism,
              double sensitivity, double stddev, int64_t dimension);

  Rng& rng_;
  RunControls controls_;
};

}  // namespace dpnc

#endif  // DPNC_PRIVACY_H_
