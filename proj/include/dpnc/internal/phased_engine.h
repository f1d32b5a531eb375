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


// Phase loop shared by the smooth and Moreau-oracle phased SGD drivers.

#ifndef DPNC_INTERNAL_PHASED_ENGINE_H_
#define DPNC_INTERNAL_PHASED_ENGINE_H_

#include <functional>
#include <string>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpnc/phased_sgd.h"
#include "dpnc/privacy.h"
#include "dpnc/rng.h"

namespace dpnc::internal {

struct PhasedEngineSpec {
  std::string mechanism;
  double eta = 0.0;
  // Per-phase noise std and the sensitivity it was derived from.
  std::function<double(double eta_i)> noise_std;
  std::function<double(double eta_i)> sensitivity;
  // Derivative of the per-sample loss in the margin; the step is
  // -eta_i * slope * x.
  std::function<absl::StatusOr<double>(double margin, double y)> slope;
};

absl::StatusOr<Eigen::VectorXd> RunPhasedEngine(
    const RowMatrix& features, const Eigen::VectorXd& labels,
    const Eigen::VectorXd& w0, const PhasedEngineSpec& spec,
    const RunControls& controls, PhasedTrace* trace, Rng& rng);

// Resolves options.w0 against the working dimension.
absl::StatusOr<Eigen::VectorXd> ResolveStart(const PhasedSgdOptions& options,
                                             int64_t dim);

// Clamps eta to `cap` with a warning.
double CapStep(double eta, double cap, const char* what);

}  // namespace dpnc::internal

#endif  // DPNC_INTERNAL_PHASED_ENGINE_H_
