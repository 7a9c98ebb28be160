// Copyright 2026 The SCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scl/classify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "scl/errors.hpp"
#include "test_util.hpp"

namespace scl {
namespace {

using testing::central_difference;
using testing::random_vector;
using testing::relative_error;
using testing::TempDir;

constexpr Label S = Label::kSarcastic;
constexpr Label N = Label::kNonSarcastic;

nn::Vector vec(std::initializer_list<double> values) {
  nn::Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

MlpHead toy_head() {
  MlpHead head(2, 2, 2);
  head.hidden_layer().weight << 1, -1,  //
      2, 0;
  head.hidden_layer().bias << 0, -1;
  head.output_layer().weight << 1, 0,  //
      0, 1;
  head.output_layer().bias << 0.5, 0;
  return head;
}

TEST(MlpHead, HandComputedForward) {
  const MlpHead head = toy_head();
  // hidden = relu((-1, 2) + (0, -1)) = (0, 1); logits = (0, 1) + (0.5, 0)
  const nn::Vector logits = head_forward(head, vec({1, 2}));
  EXPECT_DOUBLE_EQ(logits(0), 0.5);
  EXPECT_DOUBLE_EQ(logits(1), 1.0);
  EXPECT_NEAR(prob_sarcastic(logits), 0.6224593, 1e-7);
  // hidden = relu((3, 6) + (0, -1)) = (3, 5)
  const nn::Vector other = head_forward(head, vec({3, 0}));
  EXPECT_DOUBLE_EQ(other(0), 3.5);
  EXPECT_DOUBLE_EQ(other(1), 5.0);
}

TEST(MlpHead, WrongInputLength) {
  const MlpHead head = toy_head();
  EXPECT_THROW(head_forward(head, vec({1, 2, 3})), DimensionError);
}

TEST(MlpHead, Defaults) {
  MlpHead head;
  EXPECT_EQ(head.input_dim(), 768u);
  EXPECT_EQ(head.hidden_dim(), 128u);
  EXPECT_EQ(head.output_dim(), 2u);
}

TEST(MlpHead, BackwardMatchesFiniteDifference) {
  MlpHead head(5, 7, 2);
  nn::Rng rng(1);
  head.init(rng);
  std::mt19937_64 vrng(2);
  const nn::Vector x = random_vector(vrng, 5);
  const nn::Vector w = random_vector(vrng, 2);
  MlpHead::Tape tape;
  head.forward(x, tape);
  head.zero_grad();
  const nn::Vector dx = head.backward(tape, w);
  auto f = [&](const nn::Vector& in) { return w.dot(head.forward(in)); };
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_LT(relative_error(dx(i), central_difference(f, x, i)), 1e-5);
  }
}

FusionConfig tiny_fusion(FusionTopology topology = FusionTopology::kTweetAfterReduction) {
  FusionConfig cfg;
  cfg.streams = {{MethodTag::kA1, 1}, {MethodTag::kA2Generic, 1}, {MethodTag::kA3, 1}};
  cfg.reduced_dim = 1;
  cfg.tweet_dim = 1;
  cfg.hidden_dim = 2;
  cfg.topology = topology;
  return cfg;
}

TEST(FuseVectors, ToyConcatenation) {
  const FusionConfig cfg = tiny_fusion();
  const float a1[] = {1}, a2[] = {2}, a3[] = {3};
  EXPECT_EQ(fuse_vectors(a1, a2, a3, cfg), vec({1, 2, 3}));
  const float z[] = {0};
  EXPECT_EQ(fuse_vectors(z, z, z, cfg), vec({0, 0, 0}));
}

TEST(FuseVectors, ErrorNamesStream) {
  FusionConfig cfg = tiny_fusion();
  const float ok[] = {1}, bad[] = {1, 2};
  try {
    fuse_vectors(ok, ok, bad, cfg);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("A3"), std::string::npos);
  }
  try {
    fuse_vectors(bad, ok, ok, cfg);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("A1"), std::string::npos);
  }
}

TEST(FuseVectors, SlicesRecoverStreams) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> d(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    FusionConfig cfg;
    const std::size_t dims[] = {1 + rng() % 20, 1 + rng() % 20, 1 + rng() % 20};
    cfg.streams = {{MethodTag::kA1, dims[0]}, {MethodTag::kA2Generic, dims[1]},
                   {MethodTag::kA3, dims[2]}};
    std::vector<float> parts[3];
    for (int s = 0; s < 3; ++s) {
      parts[s].resize(dims[s]);
      for (float& x : parts[s]) x = d(rng);
    }
    const nn::Vector fused = fuse_vectors(parts[0], parts[1], parts[2], cfg);
    ASSERT_EQ(static_cast<std::size_t>(fused.size()), cfg.fused_dim());
    Eigen::Index offset = 0;
    for (int s = 0; s < 3; ++s) {
      for (std::size_t k = 0; k < dims[s]; ++k) EXPECT_EQ(fused(offset++), parts[s][k]);
    }
  }
}

TEST(FuseVectors, FullScaleWidth) {
  const FusionConfig cfg = full_scale_fusion_config();
  EXPECT_EQ(cfg.fused_dim(), 39936u);
  EXPECT_EQ(cfg.head_input_dim(), 768u + 768u);
  const FusionConfig small = full_scale_fusion_config(16, 12, 64);
  EXPECT_EQ(small.fused_dim(), 16u * 12u + 64u + 64u);
  FusionConfig pre = small;
  pre.topology = FusionTopology::kAllPreReduction;
  EXPECT_EQ(pre.pre_reduction_dim(), small.fused_dim() + 64u);
  EXPECT_EQ(pre.head_input_dim(), pre.reduced_dim);
}

TEST(FusionModel, HandComputedForward) {
  FusionModel model(tiny_fusion());
  model.reducer().weight << 1, 2, 3;
  model.reducer().bias << 0;
  model.head().hidden_layer().weight.setIdentity();
  model.head().hidden_layer().bias.setZero();
  model.head().output_layer().weight.setIdentity();
  model.head().output_layer().bias.setZero();
  // reduced = 6, head input = (6, tweet)
  EXPECT_EQ(fusion_forward(model, vec({1, 1, 1}), vec({0.5})), vec({6, 0.5}));
  EXPECT_THROW(fusion_forward(model, vec({1, 1}), vec({0.5})), DimensionError);
  EXPECT_THROW(fusion_forward(model, vec({1, 1, 1}), vec({0.5, 1})), DimensionError);
}

TEST(FusionModel, BiasOnlyOutputWhenWeightsAreZero) {
  FusionModel model(tiny_fusion());
  for (nn::Parameter& p : model.parameters()) std::fill(p.value, p.value + p.size, 0.0);
  model.head().output_layer().bias << 0.25, -0.75;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    EXPECT_EQ(fusion_forward(model, random_vector(rng, 3), random_vector(rng, 1)),
              vec({0.25, -0.75}));
  }
}

TEST(FusionModel, OutputDependsOnTweetStream) {
  for (FusionTopology t :
       {FusionTopology::kTweetAfterReduction, FusionTopology::kAllPreReduction}) {
    FusionConfig cfg = tiny_fusion(t);
    cfg.hidden_dim = 8;
    cfg.reduced_dim = 4;
    FusionModel model(cfg);
    nn::Rng rng(5);
    model.init(rng);
    const nn::Vector fused = vec({0.3, -0.2, 0.9});
    EXPECT_NE(fusion_forward(model, fused, vec({-1})), fusion_forward(model, fused, vec({1})));
  }
}

TEST(FusionModel, BackwardMatchesFiniteDifference) {
  for (FusionTopology t :
       {FusionTopology::kTweetAfterReduction, FusionTopology::kAllPreReduction}) {
    FusionConfig cfg = tiny_fusion(t);
    cfg.hidden_dim = 5;
    cfg.reduced_dim = 3;
    FusionModel model(cfg);
    nn::Rng rng(6);
    model.init(rng);
    std::mt19937_64 vrng(7);
    const nn::Vector fused = random_vector(vrng, 3), tweet = random_vector(vrng, 1);
    const nn::Vector w = random_vector(vrng, 2);
    FusionModel::Tape tape;
    model.forward(fused, tweet, tape);
    model.zero_grad();
    model.backward(tape, w);
    for (nn::Parameter& p : model.parameters()) {
      for (std::size_t k = 0; k < p.size; ++k) {
        const double orig = p.value[k];
        p.value[k] = orig + 1e-5;
        const double up = w.dot(model.forward(fused, tweet));
        p.value[k] = orig - 1e-5;
        const double down = w.dot(model.forward(fused, tweet));
        p.value[k] = orig;
        EXPECT_LT(relative_error(p.grad[k], (up - down) / 2e-5), 1e-4) << p.name;
      }
    }
  }
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy_loss(vec({0, 0}), S), std::log(2.0), 1e-12);
  EXPECT_NEAR(cross_entropy_loss(vec({0, 0}), N), std::log(2.0), 1e-12);
  EXPECT_NEAR(cross_entropy_loss(vec({0, std::log(3.0)}), S), 0.2876821, 1e-7);
  EXPECT_NEAR(cross_entropy_loss(vec({1000, 0}), S), 1000.0, 1e-9);
  EXPECT_NEAR(cross_entropy_loss(vec({1000, 0}), N), 0.0, 1e-12);
}

TEST(CrossEntropy, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const nn::Vector logits = random_vector(rng, 2, 3.0);
    for (Label gold : {S, N}) {
      const nn::Vector g = cross_entropy_grad(logits, gold);
      for (Eigen::Index i = 0; i < 2; ++i) {
        const double num = central_difference(
            [&](const nn::Vector& x) { return cross_entropy_loss(x, gold); }, logits, i);
        EXPECT_LT(relative_error(g(i), num), 1e-5);
      }
    }
  }
}

TEST(SoftFBeta, Examples) {
  const std::vector<double> perfect = {1, 0};
  const std::vector<Label> golds = {S, N};
  EXPECT_NEAR(soft_fbeta_loss(perfect, golds, 1.0), 0.0, 1e-8);
  const std::vector<double> half = {0.5, 0.5};
  EXPECT_NEAR(soft_fbeta_loss(half, golds, 1.0), 0.5, 1e-8);
  EXPECT_NEAR(soft_fbeta_loss(half, golds, 2.0), 0.5, 1e-8);
  const std::vector<double> mixed = {0.8, 0.3, 0.6};
  const std::vector<Label> mixed_golds = {S, N, S};
  // tp 1.4, fp 0.3, fn 0.6
  EXPECT_NEAR(soft_fbeta_loss(mixed, mixed_golds, 1.0), 1.0 - 2.8 / 3.7, 1e-8);
  // With no positives predicted or present the loss is 1.
  const std::vector<double> none = {0, 0};
  const std::vector<Label> all_neg = {N, N};
  EXPECT_NEAR(soft_fbeta_loss(none, all_neg, 1.0), 1.0, 1e-12);
}

TEST(SoftFBeta, RejectsBadBatches) {
  const std::vector<double> probs = {0.5};
  const std::vector<Label> two = {S, N};
  EXPECT_THROW(soft_fbeta_loss({}, {}, 1.0), InvalidArgument);
  EXPECT_THROW(soft_fbeta_loss(probs, two, 1.0), InvalidArgument);
  EXPECT_THROW(soft_fbeta_loss(probs, std::vector<Label>{S}, 0.0), InvalidArgument);
}

TEST(SoftFBeta, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<double> probs(n);
    std::vector<Label> golds(n);
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = u(rng);
      golds[i] = label_from_int(static_cast<int>(rng() % 2));
    }
    const double beta = trial % 2 ? 1.0 : 0.5 + u(rng) * 2;
    const std::vector<double> g = soft_fbeta_grad(probs, golds, beta);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> up = probs, down = probs;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double num =
          (soft_fbeta_loss(up, golds, beta) - soft_fbeta_loss(down, golds, beta)) / 2e-6;
      EXPECT_LT(relative_error(g[i], num), 1e-4);
    }
  }
}

TEST(SoftFBeta, HardProbabilitiesGiveOneMinusF1) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<double> probs(n);
    std::vector<Label> golds(n);
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = static_cast<double>(rng() % 2);
      golds[i] = label_from_int(static_cast<int>(rng() % 2));
      const bool y = golds[i] == S;
      tp += probs[i] * y;
      fp += probs[i] * !y;
      fn += (1 - probs[i]) * y;
    }
    if (tp == 0) continue;
    const double f1 = 2 * tp / (2 * tp + fp + fn);
    EXPECT_NEAR(soft_fbeta_loss(probs, golds, 1.0), 1.0 - f1, 1e-8);
  }
}

TEST(Softmax, Properties) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const nn::Vector logits = random_vector(rng, 2 + rng() % 5, 10.0);
    const nn::Vector p = nn::softmax(logits);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_TRUE((p.array() >= 0).all());
    const nn::Vector shifted = nn::softmax((logits.array() + 123.0).matrix());
    EXPECT_LT((p - shifted).norm(), 1e-12);
    if (logits.size() == 2) EXPECT_NEAR(prob_sarcastic(logits), p(1), 1e-12);
  }
  EXPECT_TRUE(nn::softmax(vec({1000, 0})).allFinite());
}

FeatureSet separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.5);
  FeatureSet set;
  set.features.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const bool sarcastic = i % 2 == 0;
    const double c = sarcastic ? 2.0 : -2.0;
    set.features(static_cast<Eigen::Index>(i), 0) = c + noise(rng);
    set.features(static_cast<Eigen::Index>(i), 1) = -c + noise(rng);
    set.labels.push_back(sarcastic ? S : N);
    set.ids.push_back("s" + std::to_string(i));
  }
  return set;
}

HeadConfig small_head() {
  HeadConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dim = 16;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  // Faster than the full-scale rate so a tiny problem converges in a few epochs.
  cfg.learning_rate = 1e-2;
  cfg.seed = 3;
  return cfg;
}

TEST(TrainHead, LearnsSeparableData) {
  const FeatureSet train = separable(200, 1);
  const FeatureSet validation = separable(100, 2);
  const TrainedHead out = train_head(train, &validation, small_head());
  EXPECT_GE(accuracy(predict(out.head, validation, MethodTag::kA1)), 0.95);
  ASSERT_EQ(out.log.epochs.size(), 20u);
  EXPECT_TRUE(out.log.epochs.back().validation_accuracy.has_value());
  EXPECT_LT(out.log.epochs.back().train_loss, out.log.epochs.front().train_loss);
  EXPECT_EQ(out.log.steps, 20u * 13u);
}

TEST(TrainHead, ZeroEpochsKeepsInitialisation) {
  HeadConfig cfg = small_head();
  cfg.epochs = 0;
  const TrainedHead out = train_head(separable(10, 1), nullptr, cfg);
  EXPECT_TRUE(out.log.epochs.empty());
  MlpHead fresh(2, 16, 2);
  nn::Rng rng(cfg.seed);
  fresh.init(rng);
  EXPECT_EQ(out.head.hidden_layer().weight, fresh.hidden_layer().weight);
}

TEST(TrainHead, DeterministicForSeed) {
  const FeatureSet train = separable(64, 1);
  const TrainedHead a = train_head(train, nullptr, small_head());
  const TrainedHead b = train_head(train, nullptr, small_head());
  EXPECT_EQ(a.head.output_layer().weight, b.head.output_layer().weight);
  HeadConfig other = small_head();
  other.seed = 4;
  EXPECT_NE(train_head(train, nullptr, other).head.output_layer().weight,
            a.head.output_layer().weight);
}

TEST(TrainHead, RejectsBadShapes) {
  HeadConfig cfg = small_head();
  cfg.input_dim = 3;
  EXPECT_THROW(train_head(separable(10, 1), nullptr, cfg), DimensionError);
  EXPECT_THROW(train_head(FeatureSet{}, nullptr, small_head()), InvalidArgument);
}

TEST(TrainHead, SoftFBetaLossTrains) {
  HeadConfig cfg = small_head();
  cfg.loss = LossKind::kSoftFBeta;
  cfg.epochs = 40;
  const FeatureSet validation = separable(100, 2);
  const TrainedHead out = train_head(separable(200, 1), &validation, cfg);
  EXPECT_GE(accuracy(predict(out.head, validation, MethodTag::kA1)), 0.95);
}

FusionFeatureSet only_a3_informative(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 1);
  FusionFeatureSet set;
  set.fused.resize(static_cast<Eigen::Index>(n), 6);
  set.tweet.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const bool sarcastic = rng() % 2 == 0;
    for (Eigen::Index k = 0; k < 6; ++k) set.fused(r, k) = noise(rng);
    for (Eigen::Index k = 0; k < 2; ++k) set.tweet(r, k) = noise(rng);
    // A3 occupies columns 4 and 5.
    set.fused(r, 4) = (sarcastic ? 2.0 : -2.0) + 0.3 * noise(rng);
    set.labels.push_back(sarcastic ? S : N);
    set.ids.push_back("f" + std::to_string(i));
  }
  return set;
}

FusionConfig informative_fusion(LossKind loss) {
  FusionConfig cfg;
  cfg.streams = {{MethodTag::kA1, 2}, {MethodTag::kA2Generic, 2}, {MethodTag::kA3, 2}};
  cfg.reduced_dim = 4;
  cfg.tweet_dim = 2;
  cfg.hidden_dim = 16;
  cfg.epochs = 40;
  cfg.batch_size = 16;
  cfg.learning_rate = 1e-2;
  cfg.loss = loss;
  cfg.seed = 2;
  return cfg;
}

TEST(TrainFusion, FindsTheInformativeStream) {
  const FusionFeatureSet train = only_a3_informative(300, 1);
  const FusionFeatureSet test = only_a3_informative(200, 2);
  for (LossKind loss : {LossKind::kCrossEntropy, LossKind::kSoftFBeta}) {
    const TrainedFusion out = train_fusion(train, &test, informative_fusion(loss));
    EXPECT_GE(accuracy(predict(out.model, test)), 0.95) << loss_name(loss);
  }
}

TEST(TrainFusion, SoftLossGetsSmall) {
  const TrainedFusion out =
      train_fusion(only_a3_informative(300, 1), nullptr, informative_fusion(LossKind::kSoftFBeta));
  EXPECT_LT(out.log.epochs.back().train_loss, 0.1);
}

TEST(TrainFusion, RejectsMismatchedFeatures) {
  FusionFeatureSet train = only_a3_informative(10, 1);
  FusionConfig cfg = informative_fusion(LossKind::kSoftFBeta);
  cfg.tweet_dim = 3;
  EXPECT_THROW(train_fusion(train, nullptr, cfg), DimensionError);
}

TEST(Predict, DecisionRule) {
  EXPECT_EQ(decide(0.5), S);
  EXPECT_EQ(decide(std::nextafter(0.5, 0.0)), N);
  EXPECT_EQ(make_prediction("x", MethodTag::kA1, vec({0, 0}), N).predicted, S);
  EXPECT_NEAR(prob_sarcastic(vec({0, 10})), 0.9999546, 1e-7);
  EXPECT_THROW(prob_sarcastic(vec({1, 2, 3})), DimensionError);
}

TEST(Predict, PreservesInputOrder) {
  const MlpHead head = toy_head();
  FeatureSet data;
  data.features.resize(3, 2);
  data.features << 1, 2,  //
      3, 0,               //
      -5, -5;
  data.ids = {"c", "a", "b"};
  data.labels = {S, N, N};
  const auto records = predict(head, data, MethodTag::kA2Tweet);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].sample_id, "c");
  EXPECT_EQ(records[1].sample_id, "a");
  EXPECT_EQ(records[2].sample_id, "b");
  EXPECT_EQ(records[0].method, MethodTag::kA2Tweet);
  EXPECT_EQ(records[0].predicted, S);
  // logits (0.5, 0) at the origin after relu
  EXPECT_EQ(records[2].predicted, N);
  EXPECT_NEAR(accuracy(records), 2.0 / 3.0, 1e-12);
}

TEST(Persistence, HeadRoundTrip) {
  TempDir dir;
  MlpHead head(3, 4, 2);
  nn::Rng rng(1);
  head.init(rng);
  save_head(dir / "h.bin", head);
  const MlpHead back = load_head(dir / "h.bin");
  EXPECT_EQ(back.hidden_layer().weight, head.hidden_layer().weight);
  EXPECT_EQ(back.output_layer().bias, head.output_layer().bias);
  EXPECT_THROW(load_head(dir / "missing.bin"), IoError);
  testing::write_file(dir / "junk.bin", "garbage");
  EXPECT_THROW(load_head(dir / "junk.bin"), ParseError);
}

TEST(Persistence, FusionRoundTrip) {
  TempDir dir;
  FusionConfig cfg = tiny_fusion(FusionTopology::kAllPreReduction);
  cfg.loss = LossKind::kSoftFBeta;
  cfg.beta = 2.0;
  FusionModel model(cfg);
  nn::Rng rng(1);
  model.init(rng);
  save_fusion(dir / "f.bin", model);
  const FusionModel back = load_fusion(dir / "f.bin");
  EXPECT_EQ(back.config().topology, FusionTopology::kAllPreReduction);
  EXPECT_EQ(back.config().fused_dim(), 3u);
  EXPECT_EQ(fusion_forward(back, vec({1, 2, 3}), vec({4})),
            fusion_forward(model, vec({1, 2, 3}), vec({4})));
}

TEST(Persistence, PredictionsRoundTrip) {
  const std::vector<PredictionRecord> records = {
      {"a", MethodTag::kA1, 0.25, N, S},
      {"b", MethodTag::kA4, 0.5, S, S},
      {"c\"quoted\"", MethodTag::kA2Generic, 0.123456789012345, N, N}};
  std::stringstream io;
  write_predictions(io, records);
  EXPECT_EQ(read_predictions(io), records);
  std::istringstream bad("{\"sample_id\": \"x\"}\n");
  EXPECT_THROW(read_predictions(bad), ParseError);
}

}  // namespace
}  // namespace scl
