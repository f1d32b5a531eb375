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


// Declarative sweep configuration, parsed from one JSON document. The schema
// is documented in configs/README.md. Unknown keys are rejected at every
// level and all fields are validated before anything runs.

#ifndef DPNC_EXPERIMENT_CONFIG_H_
#define DPNC_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpnc {

enum class ExperimentKind {
  kGlmRiskCurve,
  kReluWellSpec,
  kReluMisspec,
  kTwoLayer,
  kMlpClipSweep,
  kMlpWidthSweep,
  kMlpIterSweep,
  kMlpNSweep,
  kNtrfFit,
};

std::string_view KindName(ExperimentKind kind);
absl::StatusOr<ExperimentKind> KindByName(std::string_view name);
bool IsMlpKind(ExperimentKind kind);
// Knobs a kind may sweep.
std::vector<std::string> AllowedKnobs(ExperimentKind kind);

struct DatasetSpec {
  std::string source = "synthetic";  // "synthetic" | "mnist"
  int64_t n = 1000;
  int64_t d = 10;
  double w_norm = 1.0;  // |w*|
  double noise_std = 0.1;
  std::string link = "sigmoid";
  // Labels are clipped to [-B, B]; unset means the link's range bound.
  std::optional<double> label_bound;
  double bias_amplitude = 0.0;
  int64_t hidden_units = 4;
  std::string inner_link = "sigmoid";
  std::string outer_link = "sigmoid";
  double flip_prob = 0.0;
  std::string mnist_images;
  std::string mnist_labels;
  std::vector<int> positive_digits = {5, 6, 7, 8, 9};
};

struct AlgorithmSpec {
  // glm-risk-curve: "auto" | "phased" | "projected" | "moreau" |
  // "moreau-projected".
  std::string variant = "auto";
  std::optional<double> eta;
  double eta_multiplier = 1.0;
  std::optional<double> theta;
  std::optional<double> beta;
  std::optional<double> gamma;
  int64_t projection_dim = 0;
  double w_bound = 1.0;
  int64_t iterations = 0;
  double alpha = 0.1;
  int64_t degree = 3;
  int64_t depth = 3;
  int64_t width = 128;
  double clip = 1.0;
  double radius = 64.0;
  double expected_batch = 64.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::string calibration = "theorem";  // "theorem" | "strict"
  std::string loss = "logistic";        // "logistic" | "squared"
  std::optional<double> noise_std;
  int64_t epochs = 20;
  int64_t batch_size = 50;
  double radius_ratio = 1.0;  // R / sqrt(m) for ntrf-fit
};

struct SweepSpec {
  std::string knob;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string id;
  ExperimentKind kind = ExperimentKind::kGlmRiskCurve;
  double epsilon = 1.0;
  // Fixed delta, or a rule in n: "1/n^2" (default) or "1/n".
  std::optional<double> delta;
  std::string delta_rule = "1/n^2";
  bool noise_free = false;  // "noise": "zero"
  std::vector<uint64_t> seeds = {0};
  int64_t n_test = 10000;
  DatasetSpec dataset;
  AlgorithmSpec algorithm;
  SweepSpec sweep;
};

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(std::string_view json);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);
absl::Status ValidateExperimentConfig(const ExperimentConfig& cfg);

// Delta for a run on n samples.
double ResolveDelta(const ExperimentConfig& cfg, int64_t n);

}  // namespace dpnc

#endif  // DPNC_EXPERIMENT_CONFIG_H_
