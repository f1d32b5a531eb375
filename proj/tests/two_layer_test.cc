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


#include "dpnc/two_layer.h"

#include <cmath>

#include "gtest/gtest.h"

namespace dpnc {
namespace {

PrivacyBudget Budget(double eps, double delta) {
  return *PrivacyBudget::Create(eps, delta);
}

TEST(FeatureMapTest, DegreeOneExample) {
  auto map = MultinomialFeatureMap(2, 1, {1.0, 1.0});
  ASSERT_TRUE(map.ok());
  EXPECT_EQ(map->output_dim(), 3);
  EXPECT_DOUBLE_EQ(map->normalizer(), std::sqrt(2.0));
  Eigen::Vector2d x(1.0, 0.0);
  const Eigen::VectorXd psi = *map->Apply(x);
  EXPECT_NEAR(psi(0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(psi(1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(psi(2), 0.0);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(FeatureMapTest, DegreeZeroIsConstant) {
  auto map = MultinomialFeatureMap(3, 0, {2.5});
  ASSERT_TRUE(map.ok());
  EXPECT_EQ(map->output_dim(), 1);
  EXPECT_EQ(*map->Apply(Eigen::Vector3d(0.1, -0.4, 0.2)),
            Eigen::VectorXd::Ones(1));
}

TEST(FeatureMapTest, DimensionAndCap) {
  EXPECT_EQ(MultinomialFeatureMap(5, 4, {1, 1, 1, 1, 1})->output_dim(),
            1 + 5 + 25 + 125 + 625);
  auto too_big = MultinomialFeatureMap(100, 3, {1, 1, 1, 1});
  ASSERT_FALSE(too_big.ok());
  EXPECT_EQ(too_big.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_NE(too_big.status().message().find("1010101"), std::string::npos);
  EXPECT_FALSE(MultinomialFeatureMap(3, 2, {1.0, 1.0}).ok());
}

// Direct polynomial evaluation of sum_j (c_j/s)^2 <x, x'>^j.
double PolyKernel(const std::vector<double>& c, double ip) {
  double s2 = 0.0;
  for (double v : c) s2 += v * v;
  double out = 0.0;
  double power = 1.0;
  for (double v : c) {
    out += v * v / s2 * power;
    power *= ip;
  }
  return out;
}

TEST(FeatureMapTest, InducedKernelMatchesPolynomial) {
  const std::vector<double> c = {0.5, 0.25, 0.0, -1.0 / 48.0};
  const FeatureMap map = *MultinomialFeatureMap(4, 3, c);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = SampleScaledSphere(rng, 4);
    const Eigen::VectorXd xp = SampleScaledSphere(rng, 4);
    const double direct = map.Apply(x)->dot(*map.Apply(xp));
    EXPECT_NEAR(direct, PolyKernel(c, x.dot(xp)), 1e-10);
    EXPECT_NEAR(map.Kernel(x, xp), direct, 1e-10);
  }
}

TEST(FeatureMapTest, NormAtMostOneOnUnitBall) {
  const FeatureMap map = *MultinomialFeatureMap(3, 4, {1, -2, 0.5, 3, 1});
  Rng rng(2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    worst = std::max(worst, map.Apply(SampleUnitSphere(rng, 3))->norm());
  }
  EXPECT_LE(worst, 1.0 + 1e-12);
}

TEST(FeatureMapTest, ApplyRowsMatchesApply) {
  const FeatureMap map = *MultinomialFeatureMap(3, 2, {1, 1, 1});
  Rng rng(3);
  RowMatrix x(5, 3);
  for (int i = 0; i < 5; ++i) x.row(i) = SampleScaledSphere(rng, 3).transpose();
  const RowMatrix rows = *map.ApplyRows(x);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rows.row(i).transpose(), *map.Apply(x.row(i).transpose()));
  }
  EXPECT_FALSE(map.Apply(Eigen::VectorXd::Ones(4)).ok());
}

TEST(TaylorTest, SigmoidCoefficients) {
  const std::vector<double> c =
      *TaylorCoefficients(LinkFunction::Sigmoid(), 5);
  ASSERT_EQ(c.size(), 6u);
  EXPECT_NEAR(c[0], 0.5, 1e-15);
  EXPECT_NEAR(c[1], 0.25, 1e-15);
  EXPECT_NEAR(c[2], 0.0, 1e-15);
  EXPECT_NEAR(c[3], -1.0 / 48.0, 1e-15);
  EXPECT_NEAR(c[4], 0.0, 1e-15);
  EXPECT_NEAR(c[5], 1.0 / 480.0, 1e-15);
}

TEST(DegreeTest, Examples) {
  EXPECT_EQ(*DegreeForAccuracy(ApproxKind::kSigmoid, 0.05), 3);
  EXPECT_EQ(*DegreeForAccuracy(ApproxKind::kRelu, 0.1), 10);
  EXPECT_EQ(*DegreeForAccuracy(ApproxKind::kSigmoid, 0.5), 1);
  EXPECT_EQ(*DegreeForAccuracy(ApproxKind::kSigmoid, 0.05, 2.0), 6);
  EXPECT_FALSE(DegreeForAccuracy(ApproxKind::kSigmoid, 1.0).ok());
  EXPECT_FALSE(DegreeForAccuracy(ApproxKind::kRelu, 0.0).ok());
}

TEST(TwoLayerDispatchTest, Rule) {
  EXPECT_EQ(*SelectTwoLayerPath(1.0, 10.0, 100), GlmPath::kPhased);
  EXPECT_EQ(*SelectTwoLayerPath(0.1, 10.0, 100), GlmPath::kProjected);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double eps = 2.0 * rng.Uniform01();
    const double theta = 1.0 + 50.0 * rng.Uniform01();
    const int64_t n = 1 + static_cast<int64_t>(rng.UniformInt(200));
    EXPECT_EQ(*SelectTwoLayerPath(eps, theta, n),
              eps > theta / static_cast<double>(n) ? GlmPath::kPhased
                                                   : GlmPath::kProjected);
  }
}

TEST(DpTwoLayerTest, DegreeOneMapReducesToGlm) {
  Rng data_rng(5);
  const GroundTruth truth = *GroundTruth::Create(
      RandomVectorWithNorm(data_rng, 4, 1.0), 1.0, 0.1,
      ModelKind::kWellSpecGlm);
  const Dataset data =
      *GenWellSpecGlm(data_rng, 512, 4, truth, LinkFunction::Sigmoid());
  const FeatureMap map = *MultinomialFeatureMap(4, 1, {0.0, 1.0});
  PhasedSgdOptions opts;
  opts.eta = 2.0;
  opts.controls.noise_mode = NoiseMode::kZero;
  Rng a(6);
  Rng b(6);
  const TwoLayerResult two = *DpTwoLayer(data, map, LinkFunction::Sigmoid(),
                                         Budget(1, 1e-4), 2.0, opts, a);
  const DpGlmResult glm =
      *DpGlm(data, LinkFunction::Sigmoid(), Budget(1, 1e-4), 2.0, opts, b);
  ASSERT_EQ(two.path, GlmPath::kPhased);
  ASSERT_EQ(glm.path, GlmPath::kPhased);
  ASSERT_EQ(two.model.w.size(), 5);
  EXPECT_EQ(two.model.w(0), 0.0);
  EXPECT_LT((two.model.w.tail(4) - glm.model.w).norm(), 1e-12);
  const Eigen::VectorXd x = data.features.row(3).transpose();
  EXPECT_NEAR(*two.model.Predict(x),
              LinkFunction::Sigmoid().Value(glm.model.w.dot(x)), 1e-12);
}

TEST(DpTwoLayerTest, StepCappedAtOneOverG) {
  Rng data_rng(7);
  const TwoLayerTruth truth = TwoLayerTruth::Random(
      data_rng, 2, 3, LinkFunction::Sigmoid(), LinkFunction::Sigmoid());
  const Dataset data = *GenTwoLayer(data_rng, 256, truth, 0.05);
  const FeatureMap map = *MultinomialFeatureMap(3, 2, {0.5, 0.25, 0.0});
  PhasedSgdOptions big;
  big.eta = 100.0;
  big.controls.noise_mode = NoiseMode::kZero;
  PhasedSgdOptions cap = big;
  cap.eta = 4.0;
  Rng a(8);
  Rng b(8);
  EXPECT_EQ(DpTwoLayer(data, map, LinkFunction::Sigmoid(), Budget(1, 1e-4),
                       1.0, big, a)
                ->model.w,
            DpTwoLayer(data, map, LinkFunction::Sigmoid(), Budget(1, 1e-4),
                       1.0, cap, b)
                ->model.w);
}

TEST(DpTwoLayerTest, ProjectedPathAndMismatch) {
  Rng data_rng(9);
  const TwoLayerTruth truth = TwoLayerTruth::Random(
      data_rng, 2, 3, LinkFunction::Sigmoid(), LinkFunction::Sigmoid());
  const Dataset data = *GenTwoLayer(data_rng, 64, truth, 0.05);
  const FeatureMap map = *MultinomialFeatureMap(3, 2, {0.5, 0.25, 0.0});
  Rng rng(10);
  auto out = DpTwoLayer(data, map, LinkFunction::Sigmoid(), Budget(0.5, 1e-4),
                        64.0, {}, rng);
  ASSERT_TRUE(out.ok());
  EXPECT_EQ(out->path, GlmPath::kProjected);
  EXPECT_EQ(out->model.w.size(), map.output_dim());
  const double h = *out->model.Predict(data.features.row(0).transpose());
  EXPECT_GE(h, 0.0);
  EXPECT_LE(h, 1.0);
  const FeatureMap wrong = *MultinomialFeatureMap(4, 1, {1.0, 1.0});
  EXPECT_EQ(DpTwoLayer(data, wrong, LinkFunction::Sigmoid(), Budget(1, 1e-4),
                       1.0, {}, rng)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

double TrainingRisk(const KernelModel& model, const Dataset& data) {
  double sum = 0.0;
  for (int64_t i = 0; i < data.size(); ++i) {
    const double r =
        *model.Predict(data.features.row(i).transpose()) - data.labels(i);
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

TEST(DpTwoLayerTest, TrainingRiskNonIncreasingInDegree) {
  Rng data_rng(11);
  const TwoLayerTruth truth = TwoLayerTruth::Random(
      data_rng, 2, 4, LinkFunction::Sigmoid(), LinkFunction::Sigmoid());
  const Dataset data = *GenTwoLayer(data_rng, 4096, truth, 0.0);
  const std::vector<double> taylor =
      *TaylorCoefficients(LinkFunction::Sigmoid(), 4);
  double prev = INFINITY;
  for (int64_t deg = 1; deg <= 4; ++deg) {
    const FeatureMap map = *MultinomialFeatureMap(
        4, deg, std::vector<double>(taylor.begin(), taylor.begin() + deg + 1));
    PhasedSgdOptions opts;
    opts.eta = 4.0;
    opts.controls.noise_mode = NoiseMode::kZero;
    Rng rng(12);
    const TwoLayerResult out = *DpTwoLayer(
        data, map, LinkFunction::Sigmoid(), Budget(1, 1e-6), 1.0, opts, rng);
    const double risk = TrainingRisk(out.model, data);
    EXPECT_LE(risk, prev + 1e-3) << "degree " << deg;
    prev = risk;
  }
}

TEST(DpTwoLayerTest, BeatsConstantPredictor) {
  Rng data_rng(13);
  const int64_t d = 5;
  const TwoLayerTruth truth = TwoLayerTruth::Random(
      data_rng, 2, d, LinkFunction::Sigmoid(), LinkFunction::Sigmoid());
  const Dataset data = *GenTwoLayer(data_rng, 8192, truth, 0.05);
  const FeatureMap map = *MultinomialFeatureMap(
      d, 4, *TaylorCoefficients(LinkFunction::Sigmoid(), 4));
  Rng rng(14);
  const TwoLayerResult out =
      *DpTwoLayer(data, map, LinkFunction::Sigmoid(), Budget(1, 1.0 / (8192.0 * 8192.0)),
                  static_cast<double>(map.output_dim()), {}, rng);
  const double mean_label = data.labels.mean();
  const Sampler source = TwoLayerSampler(truth, 0.05);
  const Predictor reference = [&](const Eigen::VectorXd& x) {
    return truth.Evaluate(x);
  };
  Rng test_a(15);
  Rng test_b(15);
  const RiskEstimate model_excess = *ExcessRiskMc(
      [&](const Eigen::VectorXd& x) { return *out.model.Predict(x); },
      reference, source, 20000, test_a);
  const RiskEstimate constant_excess = *ExcessRiskMc(
      [&](const Eigen::VectorXd&) { return mean_label; }, reference, source,
      20000, test_b);
  EXPECT_LE(model_excess.estimate, 0.75 * constant_excess.estimate)
      << "model " << model_excess.estimate << " constant "
      << constant_excess.estimate;
}

}  // namespace
}  // namespace dpnc
