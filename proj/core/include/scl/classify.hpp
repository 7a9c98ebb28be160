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

// Recognition heads: a two-layer classifier per embedding stream and the
// fusion model that reduces concatenated streams before the same head.

#ifndef SCL_CLASSIFY_HPP_
#define SCL_CLASSIFY_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scl/nn.hpp"
#include "scl/types.hpp"

namespace scl {

enum class LossKind { kCrossEntropy, kSoftFBeta };

std::string_view loss_name(LossKind kind);
LossKind parse_loss(std::string_view name);

struct HeadConfig {
  std::size_t input_dim = 768;
  std::size_t hidden_dim = 128;
  std::size_t output_dim = 2;
  std::size_t epochs = 5;
  double weight_decay = 0.01;
  double learning_rate = 1e-5;
  std::size_t batch_size = 32;
  LossKind loss = LossKind::kCrossEntropy;
  double beta = 1.0;
  std::uint64_t seed = 0;
};

// logits = W2 relu(W1 x + b1) + b2
class MlpHead {
 public:
  MlpHead(std::size_t input_dim = 768, std::size_t hidden_dim = 128,
          std::size_t output_dim = 2);

  void init(nn::Rng& rng);
  std::size_t input_dim() const { return hidden_.in_dim(); }
  std::size_t hidden_dim() const { return hidden_.out_dim(); }
  std::size_t output_dim() const { return output_.out_dim(); }

  nn::Vector forward(const nn::Vector& x) const;

  struct Tape {
    nn::Vector input;
    nn::Vector hidden_pre;
    nn::Vector hidden;
  };
  nn::Vector forward(const nn::Vector& x, Tape& tape) const;
  nn::Vector backward(const Tape& tape, const nn::Vector& grad_logits);

  void zero_grad();
  std::vector<nn::Parameter> parameters();

  nn::Linear& hidden_layer() { return hidden_; }
  nn::Linear& output_layer() { return output_; }
  const nn::Linear& hidden_layer() const { return hidden_; }
  const nn::Linear& output_layer() const { return output_; }

 private:
  nn::Linear hidden_;
  nn::Linear output_;
};

// Throws DimensionError when x has the wrong length.
nn::Vector head_forward(const MlpHead& head, const nn::Vector& x);

enum class FusionTopology {
  // Streams are concatenated and reduced; the tweet-domain embedding joins
  // after the reducer (head input = reduced_dim + tweet_dim).
  kTweetAfterReduction,
  // The tweet-domain embedding is part of the reduced concatenation.
  kAllPreReduction,
};

std::string_view topology_name(FusionTopology topology);
FusionTopology parse_topology(std::string_view name);

struct StreamSpec {
  MethodTag tag = MethodTag::kA1;
  std::size_t dim = 0;
};

struct FusionConfig {
  std::vector<StreamSpec> streams;
  std::size_t reduced_dim = 768;
  std::size_t tweet_dim = 768;
  FusionTopology topology = FusionTopology::kTweetAfterReduction;
  std::size_t hidden_dim = 128;
  std::size_t epochs = 5;
  std::size_t batch_size = 16;
  double weight_decay = 0.01;
  double learning_rate = 1e-5;
  LossKind loss = LossKind::kSoftFBeta;
  double beta = 1.0;
  std::uint64_t seed = 0;

  // Length of fuse_vectors output.
  std::size_t fused_dim() const;
  // Reducer input width.
  std::size_t pre_reduction_dim() const;
  std::size_t head_input_dim() const;
};

// Streams (A1 concat, A2_GENERIC, A3) with the tweet stream after reduction.
FusionConfig full_scale_fusion_config(std::size_t word_dim = 768, std::size_t max_words = 50,
                                 std::size_t sentence_dim = 768);

// Concatenation in cfg.streams order. Throws DimensionError naming the
// offending stream.
nn::Vector fuse_vectors(std::span<const std::span<const float>> streams,
                        const FusionConfig& cfg);
nn::Vector fuse_vectors(std::span<const float> a1, std::span<const float> a2_generic,
                        std::span<const float> a3, const FusionConfig& cfg);

class FusionModel {
 public:
  explicit FusionModel(const FusionConfig& cfg);

  void init(nn::Rng& rng);
  const FusionConfig& config() const { return cfg_; }

  nn::Vector forward(const nn::Vector& fused, const nn::Vector& tweet) const;

  struct Tape {
    nn::Vector reducer_input;
    MlpHead::Tape head;
  };
  nn::Vector forward(const nn::Vector& fused, const nn::Vector& tweet, Tape& tape) const;
  void backward(const Tape& tape, const nn::Vector& grad_logits);

  void zero_grad();
  std::vector<nn::Parameter> parameters();

  nn::Linear& reducer() { return reducer_; }
  MlpHead& head() { return head_; }
  const nn::Linear& reducer() const { return reducer_; }
  const MlpHead& head() const { return head_; }

 private:
  nn::Vector reducer_input(const nn::Vector& fused, const nn::Vector& tweet) const;

  FusionConfig cfg_;
  nn::Linear reducer_;
  MlpHead head_;
};

nn::Vector fusion_forward(const FusionModel& model, const nn::Vector& fused,
                          const nn::Vector& tweet);

// -log softmax(logits)[gold]
double cross_entropy_loss(const nn::Vector& logits, Label gold);
nn::Vector cross_entropy_grad(const nn::Vector& logits, Label gold);

inline constexpr double kSoftFBetaEpsilon = 1e-8;

// 1 - (1+b^2) TP / ((1+b^2) TP + b^2 FN + FP + eps) with probability-weighted
// counts. Throws InvalidArgument on an empty or mismatched batch.
double soft_fbeta_loss(std::span<const double> probs, std::span<const Label> golds,
                       double beta);
std::vector<double> soft_fbeta_grad(std::span<const double> probs,
                                    std::span<const Label> golds, double beta);

// softmax(logits)[SARCASTIC] for two-class logits.
double prob_sarcastic(const nn::Vector& logits);
// Ties at exactly 0.5 go to SARCASTIC.
Label decide(double prob_sarcastic);

struct FeatureSet {
  std::vector<std::string> ids;
  nn::Matrix features;  // one row per sample
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
};

struct FusionFeatureSet {
  std::vector<std::string> ids;
  nn::Matrix fused;  // one row per sample, cfg.fused_dim() columns
  nn::Matrix tweet;  // one row per sample, cfg.tweet_dim columns
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0;
  // Absent when no validation set was given.
  std::optional<double> validation_accuracy;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t steps = 0;
};

struct TrainedHead {
  MlpHead head;
  TrainLog log;
};

struct TrainedFusion {
  FusionModel model;
  TrainLog log;
};

// Seeded init, seeded shuffled mini-batches, AdamW. Throws NumericalError
// naming the step on a non-finite loss.
TrainedHead train_head(const FeatureSet& train, const FeatureSet* validation,
                       const HeadConfig& cfg);
TrainedFusion train_fusion(const FusionFeatureSet& train,
                           const FusionFeatureSet* validation, const FusionConfig& cfg);

struct PredictionRecord {
  std::string sample_id;
  MethodTag method = MethodTag::kA1;
  double prob_sarcastic = 0;
  Label predicted = Label::kNonSarcastic;
  Label gold = Label::kNonSarcastic;

  bool correct() const { return predicted == gold; }
  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

PredictionRecord make_prediction(std::string sample_id, MethodTag method,
                                 const nn::Vector& logits, Label gold);

std::vector<PredictionRecord> predict(const MlpHead& head, const FeatureSet& data,
                                      MethodTag method);
std::vector<PredictionRecord> predict(const FusionModel& model,
                                      const FusionFeatureSet& data);

// Accuracy in [0, 1] of a head on a feature set.
double accuracy(const std::vector<PredictionRecord>& records);

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions(std::istream& in);

void write_train_log(std::ostream& out, const TrainLog& log);

void save_head(const std::filesystem::path& path, MlpHead& head);
MlpHead load_head(const std::filesystem::path& path);
void save_fusion(const std::filesystem::path& path, FusionModel& model);
FusionModel load_fusion(const std::filesystem::path& path);

}  // namespace scl

#endif  // SCL_CLASSIFY_HPP_
