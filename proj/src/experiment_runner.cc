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


#include "dpnc/experiment_runner.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpnc/link_function.h"
#include "dpnc/mlp.h"
#include "dpnc/mnist.h"
#include "dpnc/moreau.h"
#include "dpnc/number_format.h"
#include "dpnc/phased_sgd.h"
#include "dpnc/relu_regression.h"
#include "dpnc/rng.h"
#include "dpnc/status_macros.h"
#include "dpnc/synthetic_data.h"
#include "dpnc/two_layer.h"

namespace dpnc {
namespace {

enum Stream : uint64_t {
  kDataStream = 0xda7a,
  kAlgorithmStream = 0xa190,
  kInitStream = 0x1417,
  kTestStream = 0x7e57,
};

Rng StreamRng(uint64_t seed, Stream stream) {
  return Rng(MixSeed(seed, stream));
}

int64_t AsCount(double v) { return static_cast<int64_t>(std::llround(v)); }

struct CellOutcome {
  std::string algorithm;
  RiskEstimate risk;
};

double Relu(double z) { return z > 0.0 ? z : 0.0; }

absl::StatusOr<CellOutcome> RunGlm(const ExperimentConfig& cfg,
                                   const PrivacyBudget& budget,
                                   const RunControls& controls,
                                   uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  const AlgorithmSpec& alg = cfg.algorithm;
  DPNC_ASSIGN_OR_RETURN(const LinkFunction link, LinkByName(ds.link));
  Rng data_rng = StreamRng(seed, kDataStream);
  DPNC_ASSIGN_OR_RETURN(
      const GroundTruth truth,
      GroundTruth::Create(RandomVectorWithNorm(data_rng, ds.d, ds.w_norm),
                          ds.w_norm, ds.noise_std, ModelKind::kWellSpecGlm));
  const double label_bound = ds.label_bound.value_or(link.range_bound());
  DPNC_ASSIGN_OR_RETURN(
      const Dataset data,
      GenWellSpecGlm(data_rng, ds.n, ds.d, truth, link, label_bound));

  PhasedSgdOptions options;
  options.eta = alg.eta;
  options.eta_multiplier = alg.eta_multiplier;
  options.controls = controls;
  const double theta = alg.theta.value_or(static_cast<double>(ds.d));
  Rng rng = StreamRng(seed, kAlgorithmStream);
  const int64_t m = alg.projection_dim > 0
                        ? alg.projection_dim
                        : DefaultProjectionDim(ds.n, budget);
  ModelVector model;
  std::string name;
  if (alg.variant == "auto") {
    DPNC_ASSIGN_OR_RETURN(DpGlmResult result,
                          DpGlm(data, link, budget, theta, options, rng));
    model = std::move(result.model);
    name = result.path == GlmPath::kPhased ? "dp_glm:phased" : "dp_glm:projected";
  } else if (alg.variant == "phased") {
    DPNC_ASSIGN_OR_RETURN(model, PhasedSgd(data, link, budget, options, rng));
    name = "phased_sgd";
  } else if (alg.variant == "projected") {
    DPNC_ASSIGN_OR_RETURN(
        model, ProjectedPhasedSgd(data, link, budget, options, m, rng));
    name = "projected_phased_sgd";
  } else {
    MoreauOptions moreau;
    moreau.beta = alg.beta;
    moreau.gamma = alg.gamma;
    moreau.r_param = theta;
    if (alg.variant == "moreau") {
      DPNC_ASSIGN_OR_RETURN(model, PhasedSgdOracle(data, link, budget, options,
                                                   moreau, rng));
      name = "phased_sgd_oracle";
    } else {
      DPNC_ASSIGN_OR_RETURN(
          model, ProjectedPhasedSgdOracle(data, link, budget, options, moreau,
                                          m, rng));
      name = "projected_phased_sgd_oracle";
    }
  }
  const Eigen::VectorXd w = model.Lifted();
  const Eigen::VectorXd w_star = truth.w_star;
  Rng test_rng = StreamRng(seed, kTestStream);
  DPNC_ASSIGN_OR_RETURN(
      const RiskEstimate risk,
      ExcessRiskMc([&](const Eigen::VectorXd& x) { return link.Value(w.dot(x)); },
                   [&](const Eigen::VectorXd& x) {
                     return link.Value(w_star.dot(x));
                   },
                   WellSpecGlmSampler(truth, link, label_bound), cfg.n_test,
                   test_rng));
  return CellOutcome{name, risk};
}

absl::StatusOr<CellOutcome> RunReluWellSpec(const ExperimentConfig& cfg,
                                            const PrivacyBudget& budget,
                                            const RunControls& controls,
                                            uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  const AlgorithmSpec& alg = cfg.algorithm;
  const LinkFunction link = LinkFunction::Relu();
  Rng data_rng = StreamRng(seed, kDataStream);
  DPNC_ASSIGN_OR_RETURN(
      const GroundTruth truth,
      GroundTruth::Create(RandomVectorWithNorm(data_rng, ds.d, ds.w_norm),
                          ds.w_norm, ds.noise_std, ModelKind::kWellSpecGlm));
  const double label_bound = *ds.label_bound;
  DPNC_ASSIGN_OR_RETURN(
      const Dataset data,
      GenWellSpecGlm(data_rng, ds.n, ds.d, truth, link, label_bound));
  ReluGdOptions options;
  options.w_bound = alg.w_bound;
  options.iterations = alg.iterations;
  options.eta = alg.eta;
  options.projection_dim = alg.projection_dim;
  options.controls = controls;
  Rng rng = StreamRng(seed, kAlgorithmStream);
  DPNC_ASSIGN_OR_RETURN(const ModelVector model,
                        DpProjectedGdRelu(data, budget, options, rng));
  const Eigen::VectorXd w = model.Lifted();
  const Eigen::VectorXd w_star = truth.w_star;
  Rng test_rng = StreamRng(seed, kTestStream);
  DPNC_ASSIGN_OR_RETURN(
      const RiskEstimate risk,
      ExcessRiskMc([&](const Eigen::VectorXd& x) { return Relu(w.dot(x)); },
                   [&](const Eigen::VectorXd& x) { return Relu(w_star.dot(x)); },
                   WellSpecGlmSampler(truth, link, label_bound), cfg.n_test,
                   test_rng));
  return CellOutcome{"relu_projected_gd", risk};
}

absl::StatusOr<CellOutcome> RunReluMisspec(const ExperimentConfig& cfg,
                                           const PrivacyBudget& budget,
                                           const RunControls& controls,
                                           uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  const AlgorithmSpec& alg = cfg.algorithm;
  Rng data_rng = StreamRng(seed, kDataStream);
  DPNC_ASSIGN_OR_RETURN(
      GroundTruth truth,
      GroundTruth::Create(RandomVectorWithNorm(data_rng, ds.d, ds.w_norm),
                          ds.w_norm, ds.noise_std, ModelKind::kMisspecified));
  DPNC_ASSIGN_OR_RETURN(
      const MisspecifiedReluModel model,
      MakeMisspecifiedReluModel(data_rng, std::move(truth), ds.bias_amplitude,
                                *ds.label_bound));
  DPNC_ASSIGN_OR_RETURN(const Dataset data,
                        GenMisspecifiedRelu(data_rng, ds.n, model));
  AdaptiveOptions options;
  options.iterations = alg.iterations > 0
                           ? alg.iterations
                           : DefaultAdaptiveIterations(alg.w_bound, ds.d,
                                                       alg.alpha);
  options.eta = alg.eta.value_or(options.eta);
  options.controls = controls;
  Rng rng = StreamRng(seed, kAlgorithmStream);
  DPNC_ASSIGN_OR_RETURN(const ModelVector fit,
                        AdaptiveDpBatchedGd(data, budget, options, rng));
  const Eigen::VectorXd w = fit.Lifted();
  const Eigen::VectorXd w_star = model.truth.w_star;
  Rng test_rng = StreamRng(seed, kTestStream);
  DPNC_ASSIGN_OR_RETURN(
      const RiskEstimate risk,
      ExcessRiskMc([&](const Eigen::VectorXd& x) { return Relu(w.dot(x)); },
                   [&](const Eigen::VectorXd& x) { return Relu(w_star.dot(x)); },
                   MisspecifiedReluSampler(model), cfg.n_test, test_rng));
  return CellOutcome{"adaptive_batched_gd", risk};
}

absl::StatusOr<CellOutcome> RunTwoLayer(const ExperimentConfig& cfg,
                                        const PrivacyBudget& budget,
                                        const RunControls& controls,
                                        uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  const AlgorithmSpec& alg = cfg.algorithm;
  DPNC_ASSIGN_OR_RETURN(const LinkFunction inner, LinkByName(ds.inner_link));
  DPNC_ASSIGN_OR_RETURN(const LinkFunction outer, LinkByName(ds.outer_link));
  Rng data_rng = StreamRng(seed, kDataStream);
  const TwoLayerTruth truth =
      TwoLayerTruth::Random(data_rng, ds.hidden_units, ds.d, inner, outer);
  DPNC_ASSIGN_OR_RETURN(const Dataset data,
                        GenTwoLayer(data_rng, ds.n, truth, ds.noise_std));
  DPNC_ASSIGN_OR_RETURN(std::vector<double> coeffs,
                        TaylorCoefficients(inner, alg.degree));
  DPNC_ASSIGN_OR_RETURN(
      const FeatureMap map,
      MultinomialFeatureMap(ds.d, alg.degree, std::move(coeffs)));
  PhasedSgdOptions options;
  options.eta = alg.eta;
  options.eta_multiplier = alg.eta_multiplier;
  options.controls = controls;
  const double theta =
      alg.theta.value_or(static_cast<double>(map.output_dim()));
  Rng rng = StreamRng(seed, kAlgorithmStream);
  DPNC_ASSIGN_OR_RETURN(const TwoLayerResult result,
                        DpTwoLayer(data, map, outer, budget, theta, options,
                                   rng));
  const KernelModel& model = result.model;
  Rng test_rng = StreamRng(seed, kTestStream);
  DPNC_ASSIGN_OR_RETURN(
      const RiskEstimate risk,
      ExcessRiskMc(
          [&](const Eigen::VectorXd& x) {
            return model.Predict(x).value_or(std::nan(""));
          },
          [&](const Eigen::VectorXd& x) { return truth.Evaluate(x); },
          TwoLayerSampler(truth, ds.noise_std), cfg.n_test, test_rng));
  const std::string name = result.path == GlmPath::kPhased
                               ? "dp_two_layer:phased"
                               : "dp_two_layer:projected";
  return CellOutcome{name, risk};
}

struct SplitData {
  Dataset train;
  Dataset test;
};

Dataset TakeRows(const Dataset& data, int64_t begin, int64_t count) {
  Dataset out;
  out.features = data.features.middleRows(begin, count);
  out.labels = data.labels.segment(begin, count);
  out.feature_norm_bound = data.feature_norm_bound;
  out.label_bound = data.label_bound;
  return out;
}

absl::StatusOr<SplitData> ClassificationData(const ExperimentConfig& cfg,
                                             uint64_t seed) {
  const DatasetSpec& ds = cfg.dataset;
  if (ds.source == "mnist") {
    DPNC_ASSIGN_OR_RETURN(const Dataset raw,
                          LoadMnistIdx(ds.mnist_images, ds.mnist_labels));
    if (raw.size() < ds.n + cfg.n_test) {
      return absl::InvalidArgumentError(absl::StrCat(
          "MNIST file holds ", raw.size(), " images; need n + n_test = ",
          ds.n + cfg.n_test));
    }
    const Dataset binary = BinarizeDigits(raw, ds.positive_digits);
    return SplitData{TakeRows(binary, 0, ds.n),
                     TakeRows(binary, ds.n, cfg.n_test)};
  }
  Rng data_rng = StreamRng(seed, kDataStream);
  const TwoLayerTruth teacher =
      TwoLayerTruth::Random(data_rng, ds.hidden_units, ds.d,
                            LinkFunction::Tanh(), LinkFunction::Identity());
  SplitData split;
  DPNC_ASSIGN_OR_RETURN(split.train, GenTeacherClassification(
                                         data_rng, ds.n, teacher, ds.flip_prob));
  Rng test_rng = StreamRng(seed, kTestStream);
  DPNC_ASSIGN_OR_RETURN(split.test,
                        GenTeacherClassification(test_rng, cfg.n_test, teacher,
                                                 ds.flip_prob));
  return split;
}

ScalarLoss LossFor(const AlgorithmSpec& alg) {
  ScalarLoss loss;
  loss.kind = alg.loss == "squared" ? LossKind::kSquared : LossKind::kLogistic;
  return loss;
}

absl::StatusOr<RiskEstimate> TestLoss(const MlpParams& params,
                                      const Dataset& test,
                                      const ScalarLoss& loss) {
  DPNC_ASSIGN_OR_RETURN(const Eigen::VectorXd out,
                        ForwardBatch(params, test.features));
  const int64_t n = out.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double v = loss.Value(out(i), test.labels(i));
    sum += v;
    sum_sq += v * v;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return RiskEstimate{mean, std::sqrt(var / nn)};
}

absl::StatusOr<CellOutcome> RunMlp(const ExperimentConfig& cfg,
                                   const PrivacyBudget& budget,
                                   const RunControls& controls,
                                   uint64_t seed) {
  const AlgorithmSpec& alg = cfg.algorithm;
  DPNC_ASSIGN_OR_RETURN(const SplitData split, ClassificationData(cfg, seed));
  Rng init_rng(MixSeed(MixSeed(seed, kInitStream),
                       static_cast<uint64_t>(alg.width)));
  DPNC_ASSIGN_OR_RETURN(
      const MlpParams w0,
      InitParams(init_rng, alg.depth, alg.width, split.train.dim()));
  DpSgdConfig sgd;
  sgd.eta = alg.eta;
  sgd.expected_batch = alg.expected_batch;
  sgd.iterations = alg.iterations;
  sgd.clip = alg.clip;
  sgd.radius = alg.radius;
  sgd.c1 = alg.c1;
  sgd.c2 = alg.c2;
  sgd.calibration = alg.calibration == "strict" ? NoiseCalibration::kStrict
                                                : NoiseCalibration::kTheorem;
  sgd.noise_std_override = alg.noise_std;
  const ScalarLoss loss = LossFor(alg);
  Rng rng = StreamRng(seed, kAlgorithmStream);
  DPNC_ASSIGN_OR_RETURN(const DpSgdResult result,
                        DpSgdTrain(split.train, w0, sgd, budget, loss,
                                   controls, rng, nullptr));
  DPNC_ASSIGN_OR_RETURN(const RiskEstimate risk,
                        TestLoss(result.averaged, split.test, loss));
  return CellOutcome{"dp_sgd", risk};
}

absl::StatusOr<CellOutcome> RunNtrf(const ExperimentConfig& cfg,
                                    uint64_t seed) {
  const AlgorithmSpec& alg = cfg.algorithm;
  DPNC_ASSIGN_OR_RETURN(const SplitData split, ClassificationData(cfg, seed));
  Rng init_rng(MixSeed(MixSeed(seed, kInitStream),
                       static_cast<uint64_t>(alg.width)));
  DPNC_ASSIGN_OR_RETURN(
      const MlpParams w0,
      InitParams(init_rng, alg.depth, alg.width, split.train.dim()));
  NtrfFitOptions options;
  options.radius =
      alg.radius_ratio * std::sqrt(static_cast<double>(alg.width));
  options.epochs = alg.epochs;
  options.batch_size = alg.batch_size;
  options.eta = alg.eta.value_or(options.eta);
  Rng rng = StreamRng(seed, kAlgorithmStream);
  DPNC_ASSIGN_OR_RETURN(const NtrfFitResult fit,
                        NtrfFit(w0, split.train, LossFor(alg), options, rng));
  return CellOutcome{"ntrf_fit", RiskEstimate{fit.train_loss, 0.0}};
}

absl::Status CheckKindRequirements(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::kReluWellSpec:
    case ExperimentKind::kReluMisspec:
      if (!cfg.dataset.label_bound.has_value()) {
        return absl::InvalidArgumentError(
            "ReLU experiments need a finite dataset.label_bound");
      }
      break;
    case ExperimentKind::kMlpClipSweep:
    case ExperimentKind::kMlpWidthSweep:
    case ExperimentKind::kMlpIterSweep:
      if (cfg.algorithm.iterations < 1) {
        return absl::InvalidArgumentError(
            "network experiments need algorithm.iterations >= 1");
      }
      break;
    default:
      break;
  }
  return absl::OkStatus();
}

}  // namespace

NetworkShape ShapeForSampleSize(int64_t n) {
  const double nd = static_cast<double>(n);
  NetworkShape shape;
  shape.width =
      std::max<int64_t>(1, std::llround(std::pow(nd, 14.0 / 15.0) / 2.0));
  shape.iterations =
      std::max<int64_t>(1, std::llround(50.0 * std::pow(nd, 2.0 / 15.0)));
  return shape;
}

absl::StatusOr<ExperimentConfig> ApplyKnob(const ExperimentConfig& cfg,
                                           double value) {
  ExperimentConfig out = cfg;
  const std::string& knob = cfg.sweep.knob;
  if (knob == "n") {
    out.dataset.n = AsCount(value);
    if (cfg.kind == ExperimentKind::kMlpNSweep) {
      const NetworkShape shape = ShapeForSampleSize(out.dataset.n);
      out.algorithm.width = shape.width;
      out.algorithm.iterations = shape.iterations;
    }
  } else if (knob == "epsilon") {
    out.epsilon = value;
  } else if (knob == "eta_multiplier") {
    out.algorithm.eta_multiplier = value;
  } else if (knob == "theta") {
    out.algorithm.theta = value;
  } else if (knob == "iterations") {
    out.algorithm.iterations = AsCount(value);
  } else if (knob == "projection_dim") {
    out.algorithm.projection_dim = AsCount(value);
  } else if (knob == "bias_amplitude") {
    out.dataset.bias_amplitude = value;
  } else if (knob == "degree") {
    out.algorithm.degree = AsCount(value);
  } else if (knob == "clip") {
    out.algorithm.clip = value;
  } else if (knob == "width") {
    out.algorithm.width = AsCount(value);
  } else if (knob == "radius_ratio") {
    out.algorithm.radius_ratio = value;
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown sweep knob \"", knob, "\""));
  }
  return out;
}

absl::StatusOr<ResultRow> RunCell(const ExperimentConfig& base, uint64_t seed,
                                  double value, bool timing, NoiseLog* log) {
  DPNC_ASSIGN_OR_RETURN(const ExperimentConfig cfg, ApplyKnob(base, value));
  DPNC_RETURN_IF_ERROR(CheckKindRequirements(cfg));
  const int64_t n = cfg.dataset.n;
  DPNC_ASSIGN_OR_RETURN(
      const PrivacyBudget budget,
      PrivacyBudget::Create(cfg.epsilon, ResolveDelta(cfg, n)));
  NoiseLog local_log;
  NoiseLog* sink = log != nullptr ? log : &local_log;
  RunControls controls;
  controls.noise_mode = cfg.noise_free ? NoiseMode::kZero : NoiseMode::kLive;
  controls.noise_log = sink;

  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<CellOutcome> outcome;
  switch (cfg.kind) {
    case ExperimentKind::kGlmRiskCurve:
      outcome = RunGlm(cfg, budget, controls, seed);
      break;
    case ExperimentKind::kReluWellSpec:
      outcome = RunReluWellSpec(cfg, budget, controls, seed);
      break;
    case ExperimentKind::kReluMisspec:
      outcome = RunReluMisspec(cfg, budget, controls, seed);
      break;
    case ExperimentKind::kTwoLayer:
      outcome = RunTwoLayer(cfg, budget, controls, seed);
      break;
    case ExperimentKind::kMlpClipSweep:
    case ExperimentKind::kMlpWidthSweep:
    case ExperimentKind::kMlpIterSweep:
    case ExperimentKind::kMlpNSweep:
      outcome = RunMlp(cfg, budget, controls, seed);
      break;
    case ExperimentKind::kNtrfFit:
      outcome = RunNtrf(cfg, seed);
      break;
  }
  if (!outcome.ok()) return outcome.status();
  const auto stop = std::chrono::steady_clock::now();

  ResultRow row;
  row.experiment = cfg.id;
  row.seed = seed;
  row.n = n;
  row.d = cfg.dataset.d;
  row.epsilon = budget.epsilon();
  row.delta = budget.delta();
  row.algorithm = outcome->algorithm;
  row.knob = cfg.sweep.knob;
  row.knob_value = value;
  row.excess_risk = outcome->risk.estimate;
  row.std_error = outcome->risk.std_error;
  row.wall_ms =
      timing ? std::chrono::duration<double, std::milli>(stop - start).count()
             : 0.0;
  row.noise_events = static_cast<int64_t>(sink->events().size());
  return row;
}

absl::StatusOr<SweepOutput> RunExperiment(const ExperimentConfig& cfg,
                                          const RunOptions& options) {
  DPNC_RETURN_IF_ERROR(ValidateExperimentConfig(cfg));
  std::vector<double> values = cfg.sweep.values;
  std::sort(values.begin(), values.end());
  std::vector<uint64_t> seeds;
  for (uint64_t s : cfg.seeds) seeds.push_back(s + options.seed_offset);
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  struct Cell {
    double value;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double v : values) {
    for (uint64_t s : seeds) cells.push_back({v, s});
  }
  const size_t count = cells.size();
  std::vector<std::optional<ResultRow>> rows(count);
  std::vector<std::vector<NoiseEvent>> logs(count);
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  absl::Status first_error;
  size_t first_error_index = count;

  auto worker = [&] {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      NoiseLog log;
      absl::StatusOr<ResultRow> row =
          RunCell(cfg, cells[i].seed, cells[i].value, options.timing, &log);
      if (!row.ok()) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = absl::Status(
              row.status().code(),
              absl::StrCat("cell seed=", cells[i].seed, " ", cfg.sweep.knob,
                           "=", FormatShortest(cells[i].value),
                           " failed: ", row.status().message()));
        }
        failed.store(true);
        return;
      }
      rows[i] = std::move(*row);
      if (options.keep_noise_logs) logs[i] = log.events();
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs,
                                             static_cast<int>(count)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) return first_error;

  SweepOutput out;
  for (size_t i = 0; i < count; ++i) {
    out.rows.push_back(std::move(*rows[i]));
    if (options.keep_noise_logs) out.noise_logs.push_back(std::move(logs[i]));
  }
  return out;
}

}  // namespace dpnc
