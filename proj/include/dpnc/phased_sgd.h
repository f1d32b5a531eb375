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


// Phased SGD for GLMs with a bounded link, its JL-projected variant, and the
// dispatcher between them.

#ifndef DPNC_PHASED_SGD_H_
#define DPNC_PHASED_SGD_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/link_function.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"
#include "dpnc/synthetic_data.h"

namespace dpnc {

struct Phase {
  int64_t size = 0;  // n_i
  double step = 0.0;  // eta_i
};

struct PhaseSchedule {
  std::vector<Phase> phases;
  // ceil(log2 n) before phases of size zero are dropped.
  int64_t nominal_phases = 0;
  // n - sum n_i; these samples are never touched.
  int64_t discarded = 0;
};

// n_i = floor(n / 2^i), eta_i = eta / 4^i for i = 1..ceil(log2 n).
absl::StatusOr<PhaseSchedule> MakePhaseSchedule(int64_t n, double eta);

// A learned linear predictor. With a lift, the model lives in R^m and scores
// x by <w, Phi x> = <Phi^T w, x>.
struct ModelVector {
  Eigen::VectorXd w;
  std::optional<JlMatrix> lift;

  // Phi^T w, or w itself when there is no lift.
  Eigen::VectorXd Lifted() const;
};

// Per-phase diagnostics for coupled-run tests.
struct PhasedTrace {
  std::vector<int64_t> phase_starts;
  std::vector<Eigen::VectorXd> pre_noise_averages;
};

struct PhasedSgdOptions {
  // Base step eta; unset selects the default for the algorithm.
  std::optional<double> eta;
  double eta_multiplier = 1.0;
  // Starting point; unset means zero.
  std::optional<Eigen::VectorXd> w0;
  RunControls controls;
  PhasedTrace* trace = nullptr;
};

// min(eps / sqrt(r ln(1/delta)), 1/sqrt(n)) times `multiplier`, capped at
// `cap`. r is the rank bound theta for the full-dimensional path and the
// projection dimension for the projected path.
double DefaultPhasedStep(int64_t n, const PrivacyBudget& budget, double r,
                         double multiplier, double cap);

// ceil(ln(n/delta) (n eps)^exponent); exponent 2/3 for GLMs and 1 for the
// two-layer reduction.
int64_t DefaultProjectionDim(int64_t n, const PrivacyBudget& budget,
                             double exponent = 2.0 / 3.0);

// One pass of SGD per phase on the surrogate loss, Gaussian noise of std
// 8 B eta_i sqrt(ln(1/delta)) / eps on each phase average. Returns the last
// phase's noisy average.
absl::StatusOr<ModelVector> PhasedSgd(const Dataset& data,
                                      const LinkFunction& link,
                                      const PrivacyBudget& budget,
                                      const PhasedSgdOptions& options,
                                      Rng& rng);

// Projects the features with one m x d JL matrix (identity when m >= d) and
// runs the phased mechanics in R^m with std 16 B eta_i sqrt(ln(2/delta)) /
// eps. m = 0 selects DefaultProjectionDim.
absl::StatusOr<ModelVector> ProjectedPhasedSgd(const Dataset& data,
                                               const LinkFunction& link,
                                               const PrivacyBudget& budget,
                                               const PhasedSgdOptions& options,
                                               int64_t m, Rng& rng);

enum class GlmPath { kPhased, kProjected };

// kPhased exactly when eps > theta^{3/2} / n.
absl::StatusOr<GlmPath> SelectGlmPath(double epsilon, double theta, int64_t n);

struct DpGlmResult {
  ModelVector model;
  GlmPath path = GlmPath::kPhased;
};

// Dispatches between PhasedSgd and ProjectedPhasedSgd. The default step uses
// theta on the full-dimensional path and m on the projected one.
absl::StatusOr<DpGlmResult> DpGlm(const Dataset& data,
                                  const LinkFunction& link,
                                  const PrivacyBudget& budget, double theta,
                                  const PhasedSgdOptions& options, Rng& rng);

}  // namespace dpnc

#endif  // DPNC_PHASED_SGD_H_
