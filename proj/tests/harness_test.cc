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


#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dpnc/experiment_config.h"
#include "dpnc/experiment_runner.h"
#include "dpnc/mlp.h"
#include "dpnc/mlp_checkpoint.h"
#include "dpnc/mnist.h"
#include "dpnc/number_format.h"
#include "dpnc/results_csv.h"
#include "gtest/gtest.h"

namespace dpnc {
namespace {

namespace fs = std::filesystem;

std::string TempPath(const std::string& name) {
  return (fs::path(::testing::TempDir()) / name).string();
}

void WriteBytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void PushWord(std::vector<uint8_t>& bytes, uint32_t word) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    bytes.push_back(static_cast<uint8_t>(word >> shift));
  }
}

std::vector<uint8_t> ImageFile(uint32_t magic, uint32_t count, uint32_t rows,
                               uint32_t cols, const std::vector<uint8_t>& px) {
  std::vector<uint8_t> bytes;
  PushWord(bytes, magic);
  PushWord(bytes, count);
  PushWord(bytes, rows);
  PushWord(bytes, cols);
  bytes.insert(bytes.end(), px.begin(), px.end());
  return bytes;
}

std::vector<uint8_t> LabelFile(uint32_t magic, const std::vector<uint8_t>& y) {
  std::vector<uint8_t> bytes;
  PushWord(bytes, magic);
  PushWord(bytes, static_cast<uint32_t>(y.size()));
  bytes.insert(bytes.end(), y.begin(), y.end());
  return bytes;
}

TEST(NumberFormatTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatShortest(1.0), "1");
  EXPECT_EQ(FormatShortest(0.03125), "0.03125");
  EXPECT_EQ(FormatShortest(0.1), "0.1");
  for (double v : {1.0 / 3.0, 6.02e23, -2.5e-300, 0.0}) {
    EXPECT_EQ(*ParseDouble(FormatShortest(v)), v);
  }
  EXPECT_FALSE(ParseDouble("1.5x").ok());
  EXPECT_FALSE(ParseDouble("").ok());
}

TEST(CheckpointTest, RoundTripIsExact) {
  Rng rng(1);
  const MlpParams p = *InitParams(rng, 3, 7, 4);
  const MlpParams q = *CheckpointFromJson(*CheckpointToJson(p));
  ASSERT_EQ(q.depth(), 3);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(q.layers[l], p.layers[l]);

  const std::string path = TempPath("ckpt.json");
  ASSERT_TRUE(WriteCheckpoint(p, path).ok());
  const MlpParams r = *ReadCheckpoint(path);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(r.layers[l], p.layers[l]);
}

TEST(CheckpointTest, RejectsBadDocuments) {
  EXPECT_FALSE(CheckpointFromJson("not json").ok());
  EXPECT_FALSE(CheckpointFromJson(
                   R"({"version": 2, "L": 2, "m": 1, "d": 1,
                       "layers": [[1], [1]]})")
                   .ok());
  EXPECT_FALSE(CheckpointFromJson(
                   R"({"version": 1, "L": 2, "m": 1, "d": 1,
                       "layers": [[1, 2], [1]]})")
                   .ok());
  EXPECT_TRUE(CheckpointFromJson(
                  R"({"version": 1, "L": 2, "m": 1, "d": 1,
                      "layers": [[1], [1]]})")
                  .ok());
  EXPECT_EQ(ReadCheckpoint(TempPath("missing.json")).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(MnistTest, LoadsAndScales) {
  const std::string images = TempPath("ok-images.idx");
  const std::string labels = TempPath("ok-labels.idx");
  WriteBytes(images, ImageFile(kIdxImageMagic, 2, 2, 2,
                               {255, 0, 0, 0, 51, 51, 51, 51}));
  WriteBytes(labels, LabelFile(kIdxLabelMagic, {7, 2}));
  const Dataset data = *LoadMnistIdx(images, labels);
  ASSERT_EQ(data.size(), 2);
  ASSERT_EQ(data.dim(), 4);
  EXPECT_EQ(data.features(0, 0), 1.0);
  EXPECT_EQ(data.features(0, 1), 0.0);
  for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(data.features(1, j), 0.2);
  EXPECT_EQ(data.labels(0), 7.0);
  EXPECT_EQ(data.labels(1), 2.0);

  const Dataset binary = BinarizeDigits(data, {5, 6, 7, 8, 9});
  EXPECT_EQ(binary.labels(0), 1.0);
  EXPECT_EQ(binary.labels(1), -1.0);
}

TEST(MnistTest, NormalizesLargeImages) {
  const std::string images = TempPath("big-images.idx");
  const std::string labels = TempPath("big-labels.idx");
  WriteBytes(images, ImageFile(kIdxImageMagic, 1, 2, 2, {255, 255, 255, 255}));
  WriteBytes(labels, LabelFile(kIdxLabelMagic, {1}));
  const Dataset data = *LoadMnistIdx(images, labels);
  EXPECT_NEAR(data.features.row(0).norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(data.features(0, 0), 0.5);
}

TEST(MnistTest, ErrorCodes) {
  const std::string images = TempPath("e-images.idx");
  const std::string labels = TempPath("e-labels.idx");
  WriteBytes(labels, LabelFile(kIdxLabelMagic, {1, 2}));

  WriteBytes(images, ImageFile(1234, 2, 1, 1, {1, 2}));
  EXPECT_EQ(LoadMnistIdx(images, labels).status().code(),
            absl::StatusCode::kInvalidArgument);

  WriteBytes(images, ImageFile(kIdxImageMagic, 2, 2, 2, {1, 2, 3}));
  EXPECT_EQ(LoadMnistIdx(images, labels).status().code(),
            absl::StatusCode::kOutOfRange);

  WriteBytes(images, {0, 0, 8});
  EXPECT_EQ(LoadMnistIdx(images, labels).status().code(),
            absl::StatusCode::kOutOfRange);

  WriteBytes(images, ImageFile(kIdxImageMagic, 3, 1, 1, {1, 2, 3}));
  EXPECT_EQ(LoadMnistIdx(images, labels).status().code(),
            absl::StatusCode::kFailedPrecondition);

  WriteBytes(images, ImageFile(kIdxImageMagic, 2, 1, 1, {1, 2}));
  WriteBytes(labels, LabelFile(kIdxImageMagic, {1, 2}));
  EXPECT_EQ(LoadMnistIdx(images, labels).status().code(),
            absl::StatusCode::kInvalidArgument);

  EXPECT_EQ(LoadMnistIdx(TempPath("nope.idx"), labels).status().code(),
            absl::StatusCode::kNotFound);
}

ResultRow SampleRow(uint64_t seed, double value) {
  ResultRow row;
  row.experiment = "demo";
  row.seed = seed;
  row.n = 1000;
  row.d = 10;
  row.epsilon = 0.5;
  row.delta = 1e-6;
  row.algorithm = "phased";
  row.knob = "n";
  row.knob_value = value;
  row.excess_risk = 1.0 / 3.0;
  row.std_error = 2.5e-5;
  row.wall_ms = 0.0;
  row.noise_events = 10;
  return row;
}

TEST(ResultsCsvTest, FormatAndRoundTrip) {
  const std::vector<ResultRow> rows = {SampleRow(0, 1000), SampleRow(1, 2000)};
  const std::string text = *FormatResultsCsv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  EXPECT_NE(text.find("demo,0,1000,10,0.5,1e-06,phased,n,1000,"),
            std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  EXPECT_EQ(*ParseResultsCsv(text), rows);

  const std::string path = TempPath("rows.csv");
  ASSERT_TRUE(WriteCsv(rows, path).ok());
  EXPECT_EQ(*ReadCsv(path), rows);
}

TEST(ResultsCsvTest, RejectsBadInput) {
  ResultRow bad = SampleRow(0, 1);
  bad.algorithm = "a,b";
  EXPECT_FALSE(FormatResultsCsv({bad}).ok());
  EXPECT_FALSE(ParseResultsCsv("wrong,header\n").ok());
  const std::string text = *FormatResultsCsv({SampleRow(0, 1)});
  EXPECT_FALSE(ParseResultsCsv(text + "demo,0,1\n").ok());
}

TEST(ResultsCsvTest, NoiseLogFormat) {
  const std::vector<NoiseEvent> events = {{1, "gaussian", 0.5, 0.25, 3},
                                          {2, "dpsgd", 2.0, 1.0, 7}};
  const std::string text = *FormatNoiseLog(events);
  EXPECT_EQ(text, std::string(kNoiseLogHeader) +
                      "\n1,gaussian,0.5,0.25,3\n2,dpsgd,2,1,7\n");
}

constexpr char kGlmConfig[] = R"({
  "id": "glm-small",
  "kind": "glm-risk-curve",
  "epsilon": 1.0,
  "seeds": [3, 1],
  "n_test": 500,
  "dataset": {"n": 200, "d": 4, "link": "sigmoid"},
  "algorithm": {"variant": "phased"},
  "sweep": {"knob": "n", "values": [400, 200]}
})";

TEST(ConfigTest, ParsesAndAppliesDefaults) {
  const ExperimentConfig cfg = *ParseExperimentConfig(kGlmConfig);
  EXPECT_EQ(cfg.id, "glm-small");
  EXPECT_EQ(cfg.kind, ExperimentKind::kGlmRiskCurve);
  EXPECT_EQ(cfg.seeds, (std::vector<uint64_t>{3, 1}));
  EXPECT_EQ(cfg.dataset.noise_std, 0.1);
  EXPECT_EQ(cfg.algorithm.variant, "phased");
  EXPECT_FALSE(cfg.noise_free);
  EXPECT_EQ(ResolveDelta(cfg, 100), 1e-4);
}

TEST(ConfigTest, KindNamesRoundTrip) {
  for (const char* name :
       {"glm-risk-curve", "relu-wellspec", "relu-misspec", "twolayer",
        "mlp-clip-sweep", "mlp-width-sweep", "mlp-iter-sweep", "mlp-n-sweep",
        "ntrf-fit"}) {
    EXPECT_EQ(KindName(*KindByName(name)), name);
  }
  EXPECT_FALSE(KindByName("bogus").ok());
  EXPECT_TRUE(IsMlpKind(ExperimentKind::kMlpNSweep));
  EXPECT_FALSE(IsMlpKind(ExperimentKind::kNtrfFit));
}

TEST(ConfigTest, RejectsInvalidDocuments) {
  EXPECT_FALSE(ParseExperimentConfig("{").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "sweep": {"knob": "n", "values": [100]}, "extra": 1})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "dataset": {"nn": 3}, "sweep": {"knob": "n", "values": [100]}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "sweep": {"knob": "clip", "values": [1]}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "sweep": {"knob": "n", "values": [100, 100]}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "epsilon": 0, "sweep": {"knob": "n", "values": [100]}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer",
      "noise": "off", "sweep": {"knob": "n", "values": [100]}})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "twolayer"})").ok());
  EXPECT_FALSE(ParseExperimentConfig(R"({"id": "x", "kind": "mlp-n-sweep",
      "sweep": {"knob": "n", "values": [100.5]}})").ok());
  EXPECT_EQ(LoadExperimentConfig(TempPath("absent.json")).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(ConfigTest, EveryPresetValidates) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(DPNC_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    EXPECT_TRUE(LoadExperimentConfig(entry.path().string()).ok())
        << entry.path();
  }
  EXPECT_GE(count, 9);
}

TEST(ConfigTest, RandomUnknownKeysAreRejected) {
  Rng rng(9);
  const std::string base = kGlmConfig;
  const std::vector<std::string> anchors = {"{\n", "\"dataset\": {",
                                            "\"algorithm\": {",
                                            "\"sweep\": {"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string key = "k";
    const int len = 1 + static_cast<int>(rng.UniformInt(8));
    for (int i = 0; i < len; ++i) {
      key.push_back(static_cast<char>('a' + rng.UniformInt(26)));
    }
    const std::string& anchor = anchors[rng.UniformInt(anchors.size())];
    std::string doc = base;
    const size_t at = doc.find(anchor) + anchor.size();
    doc.insert(at, "\"" + key + "\": 1, ");
    EXPECT_FALSE(ParseExperimentConfig(doc).ok()) << doc;
  }
}

TEST(ConfigTest, AcceptsReferenceMnistSettings) {
  const ExperimentConfig cfg = *ParseExperimentConfig(R"({
    "id": "mnist-reference",
    "kind": "mlp-clip-sweep",
    "epsilon": 1.0,
    "delta": "1/n^2",
    "dataset": {"source": "mnist", "n": 60000, "d": 784,
                "mnist_images": "train-images-idx3-ubyte",
                "mnist_labels": "train-labels-idx1-ubyte"},
    "algorithm": {"clip": 20, "eta": 0.01, "depth": 3, "width": 128},
    "sweep": {"knob": "clip", "values": [20]}
  })");
  EXPECT_EQ(cfg.dataset.n, 60000);
  EXPECT_EQ(cfg.algorithm.clip, 20.0);
  EXPECT_EQ(*cfg.algorithm.eta, 0.01);
  EXPECT_DOUBLE_EQ(ResolveDelta(cfg, 60000), 1.0 / (60000.0 * 60000.0));
}

TEST(RunnerTest, ShapeForSampleSize) {
  for (int64_t n : {2, 500, 8000, 60000}) {
    const NetworkShape shape = ShapeForSampleSize(n);
    const double nd = static_cast<double>(n);
    EXPECT_NEAR(static_cast<double>(shape.width),
                std::exp(14.0 / 15.0 * std::log(nd)) / 2.0, 0.5 + 1e-9);
    EXPECT_NEAR(static_cast<double>(shape.iterations),
                50.0 * std::exp(2.0 / 15.0 * std::log(nd)), 0.5 + 1e-9);
  }
}

TEST(RunnerTest, ApplyKnob) {
  const ExperimentConfig cfg = *ParseExperimentConfig(kGlmConfig);
  EXPECT_EQ(ApplyKnob(cfg, 400)->dataset.n, 400);
  ExperimentConfig eps = cfg;
  eps.sweep.knob = "epsilon";
  EXPECT_EQ(ApplyKnob(eps, 0.25)->epsilon, 0.25);
}

TEST(RunnerTest, RowOrderAndDeterminism) {
  const ExperimentConfig cfg = *ParseExperimentConfig(kGlmConfig);
  RunOptions options;
  options.keep_noise_logs = true;
  const SweepOutput a = *RunExperiment(cfg, options);
  ASSERT_EQ(a.rows.size(), 4u);
  const std::vector<std::pair<double, uint64_t>> order = {
      {200, 1}, {200, 3}, {400, 1}, {400, 3}};
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.rows[i].knob_value, order[i].first);
    EXPECT_EQ(a.rows[i].seed, order[i].second);
    EXPECT_EQ(a.rows[i].n, static_cast<int64_t>(order[i].first));
    EXPECT_EQ(a.rows[i].wall_ms, 0.0);
    EXPECT_EQ(a.rows[i].noise_events,
              static_cast<int64_t>(a.noise_logs[i].size()));
    EXPECT_GT(a.rows[i].noise_events, 0);
  }
  const SweepOutput b = *RunExperiment(cfg, options);
  EXPECT_EQ(*FormatResultsCsv(a.rows), *FormatResultsCsv(b.rows));

  options.jobs = 2;
  const SweepOutput c = *RunExperiment(cfg, options);
  EXPECT_EQ(*FormatResultsCsv(a.rows), *FormatResultsCsv(c.rows));

  options.seed_offset = 10;
  const SweepOutput shifted = *RunExperiment(cfg, options);
  EXPECT_EQ(shifted.rows[0].seed, 11u);
}

TEST(RunnerTest, SweepOrderDoesNotChangeRows) {
  ExperimentConfig forward = *ParseExperimentConfig(kGlmConfig);
  ExperimentConfig backward = forward;
  forward.sweep.values = {200, 400};
  backward.sweep.values = {400, 200};
  backward.seeds = {1, 3};
  const SweepOutput a = *RunExperiment(forward, {});
  const SweepOutput b = *RunExperiment(backward, {});
  EXPECT_EQ(a.rows, b.rows);

  ExperimentConfig single = forward;
  single.sweep.values = {400};
  single.seeds = {3};
  const SweepOutput c = *RunExperiment(single, {});
  EXPECT_EQ(c.rows[0], a.rows[3]);
}

TEST(RunnerTest, ZeroNoiseKeepsEventsButRemovesNoise) {
  ExperimentConfig cfg = *ParseExperimentConfig(kGlmConfig);
  cfg.seeds = {5};
  cfg.sweep.values = {400};
  const SweepOutput live = *RunExperiment(cfg, {});
  cfg.noise_free = true;
  const SweepOutput zero = *RunExperiment(cfg, {});
  EXPECT_EQ(live.rows[0].noise_events, zero.rows[0].noise_events);
  EXPECT_NE(live.rows[0].excess_risk, zero.rows[0].excess_risk);
}

}  // namespace
}  // namespace dpnc
