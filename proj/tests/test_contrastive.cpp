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

#include "scl/contrastive.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"
#include "scl/errors.hpp"
#include "test_util.hpp"

namespace scl {
namespace {

using testing::central_difference;
using testing::random_vector;
using testing::relative_error;

// Trainable encoder whose pooled output is the mean of per-word rows.
class LookupEncoder final : public TrainableEncoder {
 public:
  LookupEncoder(std::vector<std::string> words, nn::Matrix rows)
      : words_(std::move(words)), rows_(std::move(rows)), grad_(rows_.rows(), rows_.cols()) {
    grad_.setZero();
  }

  const std::string& model_id() const override { return id_; }
  std::size_t hidden_dim() const override { return static_cast<std::size_t>(rows_.cols()); }
  std::size_t max_tokens() const override { return 64; }
  std::string weights_fingerprint() const override {
    auto self = const_cast<LookupEncoder*>(this);
    const auto params = self->parameters();
    return hex64(nn::fingerprint(params));
  }

  EncodedText tokenize(std::string_view text) const override {
    EncodedText out;
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) {
      const auto it = std::find(words_.begin(), words_.end(), w);
      out.ids.push_back(static_cast<std::int32_t>(it - words_.begin()));
      out.special.push_back(false);
    }
    return out;
  }

  nn::Matrix token_outputs(const EncodedText& tokens) const override {
    nn::Matrix m(static_cast<Eigen::Index>(tokens.ids.size()), rows_.cols());
    for (std::size_t t = 0; t < tokens.ids.size(); ++t) {
      m.row(static_cast<Eigen::Index>(t)) = rows_.row(tokens.ids[t]);
    }
    return m;
  }

  struct Tape : ForwardTape {
    std::vector<std::int32_t> ids;
  };

  nn::Vector forward_pooled(const EncodedText& tokens, const PoolingOptions&,
                            std::unique_ptr<ForwardTape>* tape) const override {
    nn::Vector sum = nn::Vector::Zero(rows_.cols());
    for (std::int32_t id : tokens.ids) sum += rows_.row(id).transpose();
    if (tape) {
      auto t = std::make_unique<Tape>();
      t->ids = tokens.ids;
      *tape = std::move(t);
    }
    return sum / static_cast<double>(tokens.ids.size());
  }

  void backward_pooled(const ForwardTape& tape,
                       const Eigen::Ref<const nn::Vector>& grad_pooled) override {
    const auto& t = static_cast<const Tape&>(tape);
    for (std::int32_t id : t.ids) {
      grad_.row(id) += grad_pooled.transpose() / static_cast<double>(t.ids.size());
    }
  }

  std::vector<nn::Parameter> parameters() override {
    return {{"rows", rows_.data(), grad_.data(), static_cast<std::size_t>(rows_.size())}};
  }
  void zero_grad() override { grad_.setZero(); }
  std::unique_ptr<TrainableEncoder> clone() const override {
    return std::make_unique<LookupEncoder>(*this);
  }
  void save(const std::filesystem::path&) const override {}

  nn::Matrix& rows() { return rows_; }

 private:
  std::string id_ = "lookup";
  std::vector<std::string> words_;
  nn::Matrix rows_;
  nn::Matrix grad_;
};

// Two-word fixture: "a" and "p" share a direction, "n" is orthogonal.
LookupEncoder orthogonal_encoder() {
  nn::Matrix rows(3, 2);
  rows << 1, 0,  //
      1, 0,      //
      0, 1;
  return LookupEncoder({"a", "p", "n"}, rows);
}

void set_identity(ProjectionHead& head) {
  for (nn::Parameter& p : head.parameters()) {
    std::fill(p.value, p.value + p.size, 0.0);
    if (p.name.find("weight") != std::string::npos) {
      const auto n = static_cast<std::size_t>(std::sqrt(static_cast<double>(p.size)));
      for (std::size_t i = 0; i < n; ++i) p.value[i * n + i] = 1.0;
    }
  }
}

std::vector<TripletExample> repeated_triplets(std::size_t n) {
  return std::vector<TripletExample>(n, TripletExample{"a", "p", "n", "pair-1", "pair-2"});
}

TEST(CosineSim, Examples) {
  const std::vector<double> a = {1, 0}, b = {0, 1}, c = {2, 0}, d = {-3, 0};
  EXPECT_DOUBLE_EQ(cosine_sim(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, c), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, d), -1.0);
  const std::vector<double> e = {1, 1};
  EXPECT_NEAR(cosine_sim(a, e), 1 / std::sqrt(2.0), 1e-15);
}

TEST(CosineSim, ZeroNormAndLengthMismatch) {
  const std::vector<double> z = {0, 0}, a = {1, 0}, three = {1, 0, 0};
  EXPECT_THROW(cosine_sim(z, a), InvalidArgument);
  EXPECT_THROW(cosine_sim(a, z), InvalidArgument);
  EXPECT_THROW(cosine_sim(a, three), InvalidArgument);
}

TEST(CosineSim, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const nn::Vector a = random_vector(rng, 5), b = random_vector(rng, 5);
    const CosineGrad g = cosine_sim_grad(a, b);
    for (Eigen::Index i = 0; i < 5; ++i) {
      const double num =
          central_difference([&](const nn::Vector& x) { return cosine_sim(x, b); }, a, i);
      EXPECT_LT(relative_error(g.d_a(i), num), 1e-5);
    }
  }
}

TripletEmbeddings make(std::vector<double> a, std::vector<double> p, std::vector<double> n) {
  auto v = [](const std::vector<double>& x) {
    return nn::Vector(Eigen::Map<const nn::Vector>(x.data(), static_cast<Eigen::Index>(x.size())));
  };
  return {v(a), v(p), v(n)};
}

TEST(TripletLoss, EqualSimilaritiesGiveLn2) {
  EXPECT_NEAR(triplet_loss(make({1, 0}, {1, 1}, {1, -1}), 0.7), std::log(2.0), 1e-12);
}

TEST(TripletLoss, OrthogonalNegative) {
  // softplus(-1/0.7)
  EXPECT_NEAR(triplet_loss(make({1, 0}, {1, 0}, {0, 1}), 0.7), 0.2148299, 1e-6);
  // softplus(-1/1)
  EXPECT_NEAR(triplet_loss(make({1, 0}, {1, 0}, {0, 1}), 1.0), 0.313262, 1e-6);
}

TEST(TripletLoss, StableMatchesNaive) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const TripletEmbeddings z{random_vector(rng, 8), random_vector(rng, 8), random_vector(rng, 8)};
    const double tau = 0.05 + 2.0 * static_cast<double>(rng() % 1000) / 1000.0;
    EXPECT_NEAR(triplet_loss(z, tau), triplet_loss_naive(z, tau), 1e-9);
  }
}

TEST(TripletLoss, StableWhereNaiveOverflows) {
  const TripletEmbeddings z = make({1, 0}, {-1, 0}, {1, 0});
  const double tau = 1e-3;
  EXPECT_NEAR(triplet_loss(z, tau), 2.0 / tau, 1e-9);
  EXPECT_FALSE(std::isfinite(triplet_loss_naive(z, tau)));
}

TEST(TripletLoss, BoundsAndMonotonicity) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const TripletEmbeddings z{random_vector(rng, 4), random_vector(rng, 4), random_vector(rng, 4)};
    const double tau = 0.1 + static_cast<double>(rng() % 100) / 50.0;
    const double loss = triplet_loss(z, tau);
    EXPECT_GT(loss, 0.0);
    EXPECT_LE(loss, nn::softplus(2.0 / tau) + 1e-12);
  }
  // Loss increases with s_neg and decreases with s_pos.
  double prev = -1;
  for (double angle = 0; angle <= M_PI; angle += 0.1) {
    const double l = triplet_loss(make({1, 0}, {1, 0}, {std::cos(M_PI - angle), std::sin(M_PI - angle)}), 0.7);
    EXPECT_GT(l, prev);
    prev = l;
  }
}

TEST(TripletLoss, ScaleInvariant) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const TripletEmbeddings z{random_vector(rng, 6), random_vector(rng, 6), random_vector(rng, 6)};
    const TripletEmbeddings scaled{z.anchor * 3.5, z.positive * 0.01, z.negative * 42.0};
    EXPECT_NEAR(triplet_loss(z, 0.7), triplet_loss(scaled, 0.7), 1e-10);
  }
}

TEST(TripletLoss, RejectsBadTemperature) {
  EXPECT_THROW(triplet_loss(make({1}, {1}, {1}), 0.0), InvalidArgument);
  EXPECT_THROW(triplet_loss(make({1}, {1}, {1}), -1.0), InvalidArgument);
}

TEST(TripletLoss, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const TripletEmbeddings z{random_vector(rng, 5), random_vector(rng, 5), random_vector(rng, 5)};
    const TripletLossGrad g = triplet_loss_grad(z, 0.5);
    EXPECT_NEAR(g.loss, triplet_loss(z, 0.5), 1e-12);
    for (Eigen::Index i = 0; i < 5; ++i) {
      auto la = [&](const nn::Vector& x) { return triplet_loss({x, z.positive, z.negative}, 0.5); };
      auto lp = [&](const nn::Vector& x) { return triplet_loss({z.anchor, x, z.negative}, 0.5); };
      auto ln = [&](const nn::Vector& x) { return triplet_loss({z.anchor, z.positive, x}, 0.5); };
      EXPECT_LT(relative_error(g.d_anchor(i), central_difference(la, z.anchor, i)), 1e-5);
      EXPECT_LT(relative_error(g.d_positive(i), central_difference(lp, z.positive, i)), 1e-5);
      EXPECT_LT(relative_error(g.d_negative(i), central_difference(ln, z.negative, i)), 1e-5);
    }
  }
}

TEST(ProjectionHead, DimensionsAndDefaults) {
  ProjectionHead def;
  EXPECT_EQ(def.in_dim(), 768u);
  EXPECT_EQ(def.out_dim(), 256u);
  ProjectionHead head(5, 7, 3);
  nn::Rng rng(1);
  head.init(rng);
  EXPECT_EQ(head.forward(nn::Vector::Ones(5)).size(), 3);
  EXPECT_THROW(head.forward(nn::Vector::Ones(4)), DimensionError);
}

TEST(ProjectionHead, BackwardMatchesFiniteDifference) {
  ProjectionHead head(4, 6, 3);
  nn::Rng rng(2);
  head.init(rng);
  std::mt19937_64 vrng(3);
  const nn::Vector x = random_vector(vrng, 4);
  const nn::Vector w = random_vector(vrng, 3);
  ProjectionHead::Tape tape;
  head.forward(x, tape);
  head.zero_grad();
  const nn::Vector dx = head.backward(tape, w);
  auto f = [&](const nn::Vector& in) { return w.dot(head.forward(in)); };
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_LT(relative_error(dx(i), central_difference(f, x, i)), 1e-5);
  }
  for (nn::Parameter& p : head.parameters()) {
    for (std::size_t k = 0; k < p.size; ++k) {
      const double orig = p.value[k];
      p.value[k] = orig + 1e-5;
      const double up = f(x);
      p.value[k] = orig - 1e-5;
      const double down = f(x);
      p.value[k] = orig;
      EXPECT_LT(relative_error(p.grad[k], (up - down) / 2e-5), 1e-4) << p.name << "[" << k << "]";
    }
  }
}

TEST(HashedContextEncoder, BackwardMatchesFiniteDifference) {
  HashedContextEncoder enc(EncoderSpec{"roberta-base", 4, 0, 16, 5});
  const EncodedText tokens = enc.tokenize("alpha beta alpha gamma");
  std::mt19937_64 rng(4);
  const nn::Vector w = random_vector(rng, 4);
  for (bool exclude : {false, true}) {
    const PoolingOptions pooling{exclude};
    std::unique_ptr<ForwardTape> tape;
    enc.forward_pooled(tokens, pooling, &tape);
    enc.zero_grad();
    enc.backward_pooled(*tape, w);
    auto f = [&] { return w.dot(enc.forward_pooled(tokens, pooling, nullptr)); };
    for (nn::Parameter& p : enc.parameters()) {
      // Only touched embedding columns carry gradient; sample a spread of entries.
      for (std::size_t k = 0; k < p.size; k += std::max<std::size_t>(1, p.size / 23)) {
        const double orig = p.value[k];
        p.value[k] = orig + 1e-5;
        const double up = f();
        p.value[k] = orig - 1e-5;
        const double down = f();
        p.value[k] = orig;
        EXPECT_LT(relative_error(p.grad[k], (up - down) / 2e-5), 1e-4) << p.name << "[" << k << "]";
      }
    }
  }
}

ContrastiveConfig small_config() {
  ContrastiveConfig cfg;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 20;
  cfg.seed = 1;
  return cfg;
}

TEST(Finetune, FirstEpochLossIsInitialLoss) {
  LookupEncoder enc = orthogonal_encoder();
  ProjectionHead head(2, 2, 2);
  set_identity(head);
  const auto triplets = repeated_triplets(8);
  ContrastiveConfig cfg = small_config();
  EXPECT_NEAR(mean_triplet_loss(enc, head, triplets, cfg), nn::softplus(-1 / 0.7), 1e-12);
  const FinetuneResult r = finetune(enc, head, triplets, cfg);
  ASSERT_EQ(r.log.size(), 20u);
  EXPECT_NEAR(r.log.front().mean_loss, nn::softplus(-1 / 0.7), 1e-12);
  EXPECT_EQ(r.log.front().epoch, 1u);
  EXPECT_EQ(r.steps, 20u);
  EXPECT_LE(r.log.back().mean_loss, r.log.front().mean_loss);
  EXPECT_NE(r.fingerprint_before, r.fingerprint_after);
  EXPECT_EQ(r.fingerprint_after, enc.weights_fingerprint());
}

TEST(Finetune, LossDecreasesOnRandomInit) {
  std::mt19937_64 rng(6);
  nn::Matrix rows(6, 4);
  for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = random_vector(rng, 1)(0);
  LookupEncoder enc({"s1", "s2", "s3", "n1", "n2", "n3"}, rows);
  ProjectionHead head(4, 8, 4);
  nn::Rng hrng(2);
  head.init(hrng);
  const std::vector<TripletExample> triplets = {
      {"n1", "n2", "s1", "1", "2"}, {"n2", "n3", "s2", "2", "3"}, {"n3", "n1", "s3", "3", "1"}};
  ContrastiveConfig cfg = small_config();
  cfg.batch_size = 2;
  cfg.epochs = 50;
  const double before = mean_triplet_loss(enc, head, triplets, cfg);
  finetune(enc, head, triplets, cfg);
  EXPECT_LT(mean_triplet_loss(enc, head, triplets, cfg), before);
}

TEST(Finetune, ZeroEpochsLeaveWeightsUntouched) {
  LookupEncoder enc = orthogonal_encoder();
  ProjectionHead head(2, 2, 2);
  set_identity(head);
  const std::string before = enc.weights_fingerprint();
  ContrastiveConfig cfg = small_config();
  cfg.epochs = 0;
  const FinetuneResult r = finetune(enc, head, repeated_triplets(4), cfg);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.fingerprint_after, before);
  EXPECT_EQ(enc.weights_fingerprint(), before);
}

TEST(Finetune, DeterministicForSeed) {
  auto run = [](std::uint64_t seed) {
    HashedContextEncoder enc(EncoderSpec{"vinai/bertweet-base", 8, 0, 64, 0});
    ProjectionHead head(8, 8, 4);
    nn::Rng rng(seed);
    head.init(rng);
    const std::vector<TripletExample> triplets = {
        {"plain one", "plain two", "sarcastic one", "1", "2"},
        {"plain two", "plain three", "sarcastic two", "2", "3"},
        {"plain three", "plain one", "sarcastic three", "3", "1"}};
    ContrastiveConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 2;
    cfg.learning_rate = 1e-3;
    cfg.seed = seed;
    const FinetuneResult r = finetune(enc, head, triplets, cfg);
    return std::make_pair(r.fingerprint_after, r.log.back().mean_loss);
  };
  EXPECT_EQ(run(5), run(5));
  EXPECT_NE(run(5).first, run(6).first);
}

TEST(Finetune, NonFiniteLossThrowsWithStep) {
  nn::Matrix rows(2, 2);
  rows << 1, 0,  //
      0, 1;
  LookupEncoder enc({"a", "o"}, rows);
  ProjectionHead head(2, 2, 2);
  set_identity(head);
  // Negative equals the anchor, positive is orthogonal: margin 1/t overflows.
  ContrastiveConfig cfg = small_config();
  cfg.temperature = 1e-310;
  try {
    finetune(enc, head, {{"a", "o", "a", "1", "2"}}, cfg);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.step(), 0u);
    EXPECT_EQ(e.code(), "non_finite_loss");
  }
}

TEST(Finetune, RejectsMismatchedHead) {
  LookupEncoder enc = orthogonal_encoder();
  ProjectionHead head(3, 2, 2);
  EXPECT_THROW(finetune(enc, head, repeated_triplets(2), small_config()), DimensionError);
  ProjectionHead ok(2, 2, 2);
  EXPECT_THROW(finetune(enc, ok, {}, small_config()), InvalidArgument);
}

TEST(TrainingLog, OneJsonObjectPerEpoch) {
  std::ostringstream out;
  write_training_log(out, {{1, 0.5, 0.1}, {2, 0.25, 0.2}});
  std::istringstream in(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ++n;
    EXPECT_EQ(j.at("epoch").get<std::size_t>(), n);
    EXPECT_TRUE(j.contains("mean_loss"));
    EXPECT_TRUE(j.contains("wall_seconds"));
  }
  EXPECT_EQ(n, 2u);
}

}  // namespace
}  // namespace scl
