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


// Sweep orchestration: one independent cell per (seed, swept value).

#ifndef DPNC_EXPERIMENT_RUNNER_H_
#define DPNC_EXPERIMENT_RUNNER_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dpnc/experiment_config.h"
#include "dpnc/privacy.h"
#include "dpnc/results_csv.h"

namespace dpnc {

struct RunOptions {
  uint64_t seed_offset = 0;
  int jobs = 1;
  // Off by default so repeated runs give byte-identical CSV; wall_ms is then 0.
  bool timing = false;
  bool keep_noise_logs = false;
};

struct SweepOutput {
  // Sorted by (knob value, seed).
  std::vector<ResultRow> rows;
  // Parallel to rows; filled only with keep_noise_logs.
  std::vector<std::vector<NoiseEvent>> noise_logs;
};

// Copy of cfg with the swept knob set to `value`.
absl::StatusOr<ExperimentConfig> ApplyKnob(const ExperimentConfig& cfg,
                                           double value);

// Width m = n^(14/15) / 2 and iterations T = 50 n^(2/15), rounded.
struct NetworkShape {
  int64_t width = 1;
  int64_t iterations = 1;
};
NetworkShape ShapeForSampleSize(int64_t n);

// Runs one cell. Every random stream is derived from the seed alone, so cells
// that share a seed share data, initialization and noise draws.
absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& cfg, uint64_t seed,
                                  double value, bool timing, NoiseLog* log);

absl::StatusOr<SweepOutput> RunExperiment(const ExperimentConfig& cfg,
                                          const RunOptions& options);

}  // namespace dpnc

#endif  // DPNC_EXPERIMENT_RUNNER_H_
