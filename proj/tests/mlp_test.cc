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


#include "dpnc/mlp.h"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace dpnc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PrivacyBudget Budget(double eps, double delta) {
  return *PrivacyBudget::Create(eps, delta);
}

MlpParams Tiny(double w1, double w2) {
  MlpParams p;
  p.layers.push_back(Eigen::MatrixXd::Constant(1, 1, w1));
  p.layers.push_back(Eigen::MatrixXd::Constant(1, 1, w2));
  return p;
}

Dataset ClassificationData(Rng& rng, int64_t n, int64_t d) {
  const TwoLayerTruth teacher = TwoLayerTruth::Random(
      rng, 2, d, LinkFunction::Tanh(), LinkFunction::Identity());
  return *GenTeacherClassification(rng, n, teacher, 0.05);
}

double Variance(const Eigen::MatrixXd& m) {
  const double mean = m.mean();
  return (m.array() - mean).square().sum() / static_cast<double>(m.size() - 1);
}

TEST(InitTest, LayerVariances) {
  Rng rng(1);
  const MlpParams p = *InitParams(rng, 3, 1000, 100);
  ASSERT_EQ(p.depth(), 3);
  EXPECT_EQ(p.layers[0].rows(), 1000);
  EXPECT_EQ(p.layers[0].cols(), 100);
  EXPECT_EQ(p.layers[1].rows(), 1000);
  EXPECT_EQ(p.layers[1].cols(), 1000);
  EXPECT_EQ(p.layers[2].rows(), 1);
  EXPECT_NEAR(Variance(p.layers[0]), 2.0 / 1000, 0.05 * 2.0 / 1000);
  EXPECT_NEAR(Variance(p.layers[1]), 2.0 / 1000, 0.05 * 2.0 / 1000);

  Rng wide_rng(2);
  const MlpParams wide = *InitParams(wide_rng, 2, 10000, 1);
  EXPECT_NEAR(Variance(wide.layers[1]), 1.0 / 10000, 0.1 / 10000);
}

TEST(InitTest, DeterministicAndValidated) {
  Rng a(3);
  Rng b(3);
  const MlpParams pa = *InitParams(a, 3, 16, 4);
  const MlpParams pb = *InitParams(b, 3, 16, 4);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(pa.layers[l], pb.layers[l]);
  EXPECT_FALSE(InitParams(a, 1, 16, 4).ok());
  EXPECT_FALSE(InitParams(a, 3, 0, 4).ok());
  EXPECT_FALSE(InitParams(a, 3, 16, 0).ok());
}

TEST(ForwardTest, Examples) {
  const ForwardTrace t = *Forward(Tiny(2.0, 3.0), Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_EQ(t.output, 3.0);
  EXPECT_EQ(t.masks[0](0), 1.0);
  EXPECT_EQ(t.hidden[1](0), 1.0);

  Rng rng(4);
  MlpParams p = *InitParams(rng, 3, 8, 5);
  p.layers[0].setZero();
  EXPECT_EQ(Forward(p, SampleUnitSphere(rng, 5))->output, 0.0);
  EXPECT_FALSE(Forward(p, Eigen::VectorXd::Ones(4)).ok());
}

TEST(ForwardTest, PositiveHomogeneity) {
  Rng rng(5);
  const MlpParams p = *InitParams(rng, 3, 32, 6);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x = SampleUnitSphere(rng, 6);
    const double f = Forward(p, x)->output;
    for (double c : {0.5, 2.0}) {
      EXPECT_NEAR(Forward(p, c * x)->output, c * f, 1e-12 * (1 + std::abs(f)));
    }
  }
}

TEST(ForwardTest, TraceMatchesDefinition) {
  Rng rng(6);
  const MlpParams p = *InitParams(rng, 4, 10, 3);
  const Eigen::VectorXd x = SampleUnitSphere(rng, 3);
  const ForwardTrace t = *Forward(p, x);
  ASSERT_EQ(t.hidden.size(), 4u);
  ASSERT_EQ(t.masks.size(), 3u);
  EXPECT_EQ(t.hidden[0], x);
  for (int l = 1; l <= 3; ++l) {
    const Eigen::VectorXd pre = p.layers[l - 1] * t.hidden[l - 1];
    for (int j = 0; j < 10; ++j) {
      EXPECT_EQ(t.hidden[l](j), std::max(0.0, pre(j)));
      EXPECT_EQ(t.masks[l - 1](j), pre(j) > 0.0 ? 1.0 : 0.0);
    }
  }
  const double want = std::sqrt(10.0) * (p.layers[3] * t.hidden[3])(0);
  EXPECT_NEAR(t.output, want, 1e-12);
  const Eigen::VectorXd batch = *ForwardBatch(p, RowMatrix(x.transpose()));
  EXPECT_NEAR(batch(0), t.output, 1e-12);
}

TEST(LossTest, LogisticAndSquared) {
  const ScalarLoss logistic;
  EXPECT_NEAR(logistic.Value(0.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(logistic.Derivative(0.0, 1.0), -0.5, 1e-15);
  EXPECT_NEAR(logistic.Value(800.0, -1.0), 800.0, 1e-9);
  const ScalarLoss squared{LossKind::kSquared, 1.0};
  EXPECT_EQ(squared.Value(0.5, 0.0), 0.125);
  EXPECT_EQ(squared.Value(3.0, 0.0), 0.5);
  EXPECT_EQ(squared.Derivative(3.0, 0.0), 0.0);
  EXPECT_EQ(squared.Derivative(0.5, 0.0), 0.5);
}

TEST(GradTest, MatchesFiniteDifferences) {
  Rng rng(7);
  const ScalarLoss loss;
  for (int trial = 0; trial < 20; ++trial) {
    MlpParams p = *InitParams(rng, 3, 8, 5);
    const Eigen::VectorXd x = SampleUnitSphere(rng, 5);
    const double y = rng.Bernoulli(0.5) ? 1.0 : -1.0;
    const MlpParams g = *PerSampleGrad(p, x, y, loss);
    const double h = 1e-5;
    for (size_t l = 0; l < p.layers.size(); ++l) {
      for (int64_t k = 0; k < p.layers[l].size(); ++k) {
        double& w = p.layers[l].data()[k];
        const double saved = w;
        w = saved + h;
        const double up = loss.Value(Forward(p, x)->output, y);
        w = saved - h;
        const double down = loss.Value(Forward(p, x)->output, y);
        w = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = g.layers[l].data()[k];
        EXPECT_LE(std::abs(fd - an),
                  1e-4 * std::max(std::abs(fd), std::abs(an)) + 1e-9)
            << "trial " << trial << " layer " << l << " entry " << k;
      }
    }
  }
}

TEST(GradTest, DeadNetworkAndLastLayer) {
  Rng rng(8);
  MlpParams p = *InitParams(rng, 3, 6, 4);
  const Eigen::VectorXd x = SampleUnitSphere(rng, 4);
  const ScalarLoss loss;

  const ForwardTrace t = *Forward(p, x);
  const MlpParams g = *PerSampleGrad(p, x, 1.0, loss);
  const Eigen::MatrixXd want = loss.Derivative(t.output, 1.0) *
                               std::sqrt(6.0) * t.hidden[2].transpose();
  EXPECT_EQ(g.layers[2], want);

  p.layers[0].setZero();
  const MlpParams dead = *PerSampleGrad(p, x, -1.0, loss);
  EXPECT_EQ(dead.layers[0].norm(), 0.0);
  EXPECT_EQ(dead.layers[1].norm(), 0.0);
}

TEST(ProjectTest, Examples) {
  MlpParams p = Tiny(4.0, 0.5);
  const MlpParams q = ProjectLayers(p, 2.0);
  EXPECT_EQ(q.layers[0](0, 0), 2.0);
  EXPECT_EQ(q.layers[1](0, 0), 0.5);
  Rng rng(9);
  const MlpParams r = *InitParams(rng, 3, 20, 5);
  const MlpParams same = ProjectLayers(r, 100.0);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(same.layers[l], r.layers[l]);
  const MlpParams once = ProjectLayers(r, 0.3);
  const MlpParams twice = ProjectLayers(once, 0.3);
  for (int l = 0; l < 3; ++l) {
    EXPECT_LE(once.layers[l].norm(), 0.3 * (1 + 1e-12));
    EXPECT_EQ(twice.layers[l], once.layers[l]);
  }
}

TEST(ClippedGradientTest, MatchesPerSampleClipping) {
  Rng rng(10);
  const Dataset data = ClassificationData(rng, 40, 4);
  const MlpParams p = *InitParams(rng, 3, 12, 4);
  const ScalarLoss loss;
  const std::vector<int64_t> rows = {0, 3, 7, 8, 21, 39};
  const double clip = 0.2;
  const ClippedBatchGradient got =
      *ClippedGradientSum(p, data.features, data.labels, rows, clip, loss);
  MlpParams want = p.ZerosLike();
  for (size_t i = 0; i < rows.size(); ++i) {
    const MlpParams g = *PerSampleGrad(
        p, data.features.row(rows[i]).transpose(), data.labels(rows[i]), loss);
    const double norm = std::sqrt(g.SquaredNorm());
    EXPECT_NEAR(got.raw_norms[i], norm, 1e-12 * (1 + norm));
    EXPECT_LE(got.clipped_norms[i], clip * (1 + 1e-12));
    want.AddScaled(g, 1.0 / std::max(1.0, norm / clip));
  }
  for (int l = 0; l < 3; ++l) {
    EXPECT_LT((got.sum.layers[l] - want.layers[l]).norm(), 1e-12);
  }
}

TEST(DpSgdConfigTest, Validation) {
  DpSgdConfig cfg;
  cfg.expected_batch = 10;
  cfg.iterations = 5;
  EXPECT_DOUBLE_EQ(*ValidateDpSgdConfig(cfg, 100), 0.1);
  cfg.expected_batch = 0.5;
  EXPECT_FALSE(ValidateDpSgdConfig(cfg, 100).ok());
  cfg.expected_batch = 200;
  EXPECT_FALSE(ValidateDpSgdConfig(cfg, 100).ok());
  cfg.expected_batch = 10;
  cfg.iterations = 0;
  EXPECT_FALSE(ValidateDpSgdConfig(cfg, 100).ok());
  cfg.iterations = 5;
  cfg.clip = 0.0;
  EXPECT_FALSE(ValidateDpSgdConfig(cfg, 100).ok());

  // Settings of the reference MNIST experiment.
  DpSgdConfig paper;
  paper.eta = 0.01;
  paper.clip = 20.0;
  paper.radius = 64.0;
  paper.expected_batch = 600;
  paper.iterations = 100;
  EXPECT_TRUE(ValidateDpSgdConfig(paper, 60000).ok());
  EXPECT_TRUE(PrivacyBudget::Create(1.0, 1.0 / (60000.0 * 60000.0)).ok());
}

TEST(DpSgdConfigTest, DefaultStep) {
  EXPECT_DOUBLE_EQ(DefaultDpSgdStep(3, 128, 32.0, 4.0, 200),
                   std::sqrt(3.0) * 32.0 / (4.0 * std::sqrt(128.0 * 200.0)));
}

TEST(DpSgdTest, NoiselessFullBatchIsGradientDescent) {
  Rng rng(11);
  const Dataset data = ClassificationData(rng, 30, 3);
  const MlpParams w0 = *InitParams(rng, 2, 16, 3);
  const ScalarLoss loss;
  DpSgdConfig cfg;
  cfg.eta = 0.05;
  cfg.expected_batch = 30;
  cfg.iterations = 25;
  cfg.clip = kInf;
  cfg.radius = kInf;
  cfg.noise_std_override = 0.0;
  std::vector<double> losses;
  DpSgdObserver obs;
  obs.on_iterate = [&](int64_t, const MlpParams& w) {
    losses.push_back(*MeanLoss(w, data, loss));
  };
  Rng train_rng(12);
  const DpSgdResult out = *DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), loss,
                                      {}, train_rng, &obs);
  EXPECT_EQ(out.empty_batches, 0);

  MlpParams w = w0;
  MlpParams sum = w0.ZerosLike();
  for (int t = 0; t < 25; ++t) {
    MlpParams grad = w.ZerosLike();
    for (int64_t i = 0; i < data.size(); ++i) {
      grad.AddScaled(*PerSampleGrad(w, data.features.row(i).transpose(),
                                    data.labels(i), loss),
                     1.0 / 30.0);
    }
    w.AddScaled(grad, -0.05);
    sum.AddScaled(w, 1.0 / 25.0);
  }
  for (int l = 0; l < 2; ++l) {
    EXPECT_LT((out.last.layers[l] - w.layers[l]).norm(), 1e-10);
    EXPECT_LT((out.averaged.layers[l] - sum.layers[l]).norm(), 1e-10);
  }
  double prev = *MeanLoss(w0, data, loss);
  for (double l : losses) {
    EXPECT_LE(l, prev + 1e-12);
    prev = l;
  }
}

TEST(DpSgdTest, ClippingProjectionAndAveragingInvariants) {
  Rng rng(13);
  const Dataset data = ClassificationData(rng, 400, 5);
  const MlpParams w0 = *InitParams(rng, 3, 32, 5);
  DpSgdConfig cfg;
  cfg.expected_batch = 40;
  cfg.iterations = 50;
  cfg.clip = 0.5;
  cfg.radius = 3.0;
  cfg.eta = 0.5;
  MlpParams mean = w0.ZerosLike();
  int64_t seen = 0;
  bool clipped_ok = true;
  bool projected_ok = true;
  DpSgdObserver obs;
  obs.on_batch = [&](int64_t, const ClippedBatchGradient& g) {
    for (double c : g.clipped_norms) clipped_ok = clipped_ok && c <= 0.5;
  };
  obs.on_iterate = [&](int64_t, const MlpParams& w) {
    for (const Eigen::MatrixXd& layer : w.layers) {
      projected_ok = projected_ok && layer.norm() <= 3.0 * (1 + 1e-12);
      Eigen::MatrixXd copy = layer;
      projected_ok = projected_ok &&
                     ProjectLayers(MlpParams{{copy}}, 3.0).layers[0] == layer;
    }
    mean.AddScaled(w, 1.0);
    ++seen;
  };
  NoiseLog log;
  Rng train_rng(14);
  const DpSgdResult out =
      *DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), ScalarLoss{},
                  RunControls{NoiseMode::kLive, &log}, train_rng, &obs);
  EXPECT_TRUE(clipped_ok);
  EXPECT_TRUE(projected_ok);
  ASSERT_EQ(seen, 50);
  for (int l = 0; l < 3; ++l) {
    EXPECT_LT((out.averaged.layers[l] - mean.layers[l] / 50.0).norm(),
              1e-12 * (1 + mean.layers[l].norm()));
  }
  EXPECT_EQ(static_cast<int64_t>(log.size()), 50 - out.empty_batches);
}

TEST(DpSgdTest, NoiseStdFollowsBatchSize) {
  Rng rng(15);
  const Dataset data = ClassificationData(rng, 200, 3);
  const MlpParams w0 = *InitParams(rng, 2, 8, 3);
  DpSgdConfig cfg;
  cfg.expected_batch = 20;
  cfg.iterations = 30;
  cfg.clip = 2.0;
  cfg.radius = 10.0;
  cfg.c2 = 1.5;
  std::vector<int64_t> sizes;
  DpSgdObserver obs;
  obs.on_batch_size = [&](int64_t, int64_t s) { sizes.push_back(s); };
  NoiseLog log;
  const PrivacyBudget budget = Budget(1, 1e-5);
  Rng train_rng(16);
  ASSERT_TRUE(DpSgdTrain(data, w0, cfg, budget, ScalarLoss{},
                         RunControls{NoiseMode::kLive, &log}, train_rng, &obs)
                  .ok());
  size_t k = 0;
  for (size_t t = 0; t < sizes.size(); ++t) {
    if (sizes[t] == 0) continue;
    const NoiseEvent& e = log.events()[k++];
    const double want = 1.5 * 0.1 * 2.0 * std::sqrt(30.0 * std::log(1e5)) /
                        (static_cast<double>(sizes[t]) * 1.0);
    EXPECT_NEAR(e.stddev, want, 1e-12 * want);
    EXPECT_EQ(e.iteration, static_cast<int64_t>(t) + 1);
    EXPECT_EQ(e.dimension, w0.ParameterCount());
  }
  EXPECT_EQ(k, log.size());
}

TEST(DpSgdTest, PoissonBatchSizes) {
  Rng rng(17);
  const Dataset data = ClassificationData(rng, 100, 2);
  const MlpParams w0 = *InitParams(rng, 2, 2, 2);
  DpSgdConfig cfg;
  cfg.expected_batch = 10;
  cfg.iterations = 10000;
  cfg.noise_std_override = 0.0;
  double sum = 0.0;
  DpSgdObserver obs;
  obs.on_batch_size = [&](int64_t, int64_t s) { sum += static_cast<double>(s); };
  Rng train_rng(18);
  ASSERT_TRUE(DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), ScalarLoss{}, {},
                         train_rng, &obs)
                  .ok());
  const double mean = sum / 10000.0;
  const double se = std::sqrt(100 * 0.1 * 0.9 / 10000.0);
  EXPECT_LE(std::abs(mean - 10.0), 3.0 * se);
}

TEST(DpSgdTest, EmptyBatchesSkipWithoutNoise) {
  Rng rng(19);
  const Dataset data = ClassificationData(rng, 20, 2);
  const MlpParams w0 = *InitParams(rng, 2, 4, 2);
  DpSgdConfig cfg;
  cfg.expected_batch = 1;
  cfg.iterations = 200;
  std::vector<int64_t> sizes;
  std::vector<MlpParams> iterates;
  DpSgdObserver obs;
  obs.on_batch_size = [&](int64_t, int64_t s) { sizes.push_back(s); };
  obs.on_iterate = [&](int64_t, const MlpParams& w) { iterates.push_back(w); };
  NoiseLog log;
  Rng train_rng(20);
  const DpSgdResult out =
      *DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), ScalarLoss{},
                  RunControls{NoiseMode::kLive, &log}, train_rng, &obs);
  int64_t empty = 0;
  for (size_t t = 0; t < sizes.size(); ++t) {
    if (sizes[t] != 0) continue;
    ++empty;
    const MlpParams& before = t == 0 ? w0 : iterates[t - 1];
    for (int l = 0; l < 2; ++l) {
      EXPECT_EQ(iterates[t].layers[l], before.layers[l]);
    }
  }
  EXPECT_GT(empty, 0);
  EXPECT_EQ(out.empty_batches, empty);
  EXPECT_EQ(static_cast<int64_t>(log.size()), 200 - empty);
}

TEST(DpSgdTest, SameSeedSameResult) {
  Rng rng(21);
  const Dataset data = ClassificationData(rng, 100, 3);
  const MlpParams w0 = *InitParams(rng, 3, 8, 3);
  DpSgdConfig cfg;
  cfg.expected_batch = 10;
  cfg.iterations = 20;
  Rng a(22);
  Rng b(22);
  const DpSgdResult ra =
      *DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), ScalarLoss{}, {}, a);
  const DpSgdResult rb =
      *DpSgdTrain(data, w0, cfg, Budget(1, 1e-5), ScalarLoss{}, {}, b);
  for (int l = 0; l < 3; ++l) {
    EXPECT_EQ(ra.averaged.layers[l], rb.averaged.layers[l]);
  }
}

TEST(InitStatisticsTest, HiddenNormsConcentrate) {
  Rng rng(23);
  const int64_t d = 10;
  const MlpParams p = *InitParams(rng, 3, 512, d);
  int inside = 0;
  int total = 0;
  double worst_output = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ForwardTrace t = *Forward(p, SampleUnitSphere(rng, d));
    for (int l = 1; l <= 2; ++l) {
      const double norm = t.hidden[l].norm();
      inside += norm >= 0.8 && norm <= 1.2;
      ++total;
    }
    worst_output = std::max(worst_output, std::abs(t.output));
  }
  EXPECT_GE(inside, 0.95 * total);
  for (int i = 0; i < 800; ++i) {
    worst_output = std::max(
        worst_output, std::abs(Forward(p, SampleUnitSphere(rng, d))->output));
  }
  EXPECT_LE(worst_output, 10.0);
}

TEST(NtrfTest, IdentityAndLinearity) {
  Rng rng(24);
  const MlpParams w0 = *InitParams(rng, 3, 16, 4);
  const Eigen::VectorXd x = SampleUnitSphere(rng, 4);
  const double f0 = Forward(w0, x)->output;
  EXPECT_EQ(*NtrfEval(w0, w0.ZerosLike(), x), f0);
  MlpParams disp = w0.ZerosLike();
  for (Eigen::MatrixXd& layer : disp.layers) {
    for (int64_t k = 0; k < layer.size(); ++k) layer.data()[k] = rng.Gaussian();
  }
  const double base = *NtrfEval(w0, disp, x) - f0;
  for (double a : {-2.0, 0.5, 3.0}) {
    MlpParams scaled = disp.ZerosLike();
    scaled.AddScaled(disp, a);
    EXPECT_NEAR(*NtrfEval(w0, scaled, x) - f0, a * base,
                1e-10 * (1 + std::abs(a * base)));
  }
  const MlpParams grad = *OutputGradient(w0, x);
  EXPECT_NEAR(base, grad.Dot(disp), 1e-10 * (1 + std::abs(base)));
}

double LinearizationGap(int64_t m, Rng& rng) {
  const int64_t d = 10;
  const MlpParams w0 = *InitParams(rng, 3, m, d);
  const double radius = 1.0 / std::sqrt(static_cast<double>(m));
  double total = 0.0;
  for (int i = 0; i < 50; ++i) {
    MlpParams disp = w0.ZerosLike();
    for (Eigen::MatrixXd& layer : disp.layers) {
      for (int64_t k = 0; k < layer.size(); ++k) {
        layer.data()[k] = rng.Gaussian();
      }
      layer *= radius / layer.norm();
    }
    const Eigen::VectorXd x = SampleUnitSphere(rng, d);
    MlpParams moved = w0;
    moved.AddScaled(disp, 1.0);
    total += std::abs(Forward(moved, x)->output - *NtrfEval(w0, disp, x));
  }
  return total / 50.0;
}

TEST(NtrfTest, LinearizationErrorShrinksWithWidth) {
  Rng rng(25);
  const double g64 = LinearizationGap(64, rng);
  const double g256 = LinearizationGap(256, rng);
  const double g1024 = LinearizationGap(1024, rng);
  EXPECT_GT(g64, g256);
  EXPECT_GT(g256, g1024);
}

TEST(NtrfFitTest, ZeroRadiusKeepsInitialization) {
  Rng rng(26);
  const Dataset data = ClassificationData(rng, 100, 4);
  const MlpParams w0 = *InitParams(rng, 3, 16, 4);
  NtrfFitOptions opts;
  opts.radius = 0.0;
  opts.epochs = 2;
  const NtrfFitResult out = *NtrfFit(w0, data, ScalarLoss{}, opts, rng);
  EXPECT_EQ(out.disp.SquaredNorm(), 0.0);
  EXPECT_NEAR(out.train_loss, *MeanLoss(w0, data, ScalarLoss{}), 1e-12);
}

TEST(NtrfFitTest, LossNonIncreasingInRadius) {
  Rng rng(27);
  const Dataset data = ClassificationData(rng, 300, 5);
  const int64_t m = 32;
  const MlpParams w0 = *InitParams(rng, 3, m, 5);
  double prev = kInf;
  for (double ratio : {0.1, 0.5, 1.0}) {
    NtrfFitOptions opts;
    opts.radius = ratio * std::sqrt(static_cast<double>(m));
    opts.epochs = 40;
    opts.eta = 0.05;
    Rng fit_rng(28);
    const NtrfFitResult out = *NtrfFit(w0, data, ScalarLoss{}, opts, fit_rng);
    for (const Eigen::MatrixXd& layer : out.disp.layers) {
      EXPECT_LE(layer.norm(), ratio * (1 + 1e-12));
    }
    EXPECT_LE(out.train_loss, prev + 1e-9) << "ratio " << ratio;
    prev = out.train_loss;
  }
}

}  // namespace
}  // namespace dpnc
