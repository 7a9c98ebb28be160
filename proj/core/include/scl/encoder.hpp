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

// Sentence encoder interfaces and the built-in trainable encoder.
//
// A SentenceEncoder owns its tokenizer and produces one final-layer output
// vector per token position. Pooling lives in sentenc.hpp so every encoder
// is pooled the same way.

#ifndef SCL_ENCODER_HPP_
#define SCL_ENCODER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scl/nn.hpp"

namespace scl {

struct EncodedText {
  std::vector<std::int32_t> ids;
  // special[i] marks sequence-boundary tokens such as <s> and </s>.
  std::vector<bool> special;
  bool truncated = false;
};

struct PoolingOptions {
  bool exclude_special_tokens = false;
};

class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;

  virtual const std::string& model_id() const = 0;
  virtual std::size_t hidden_dim() const = 0;
  virtual std::size_t max_tokens() const = 0;
  // Changes whenever the weights change.
  virtual std::string weights_fingerprint() const = 0;

  // The checkpoint's own tokenization, truncated to max_tokens().
  virtual EncodedText tokenize(std::string_view text) const = 0;
  // One row per token position, hidden_dim() columns.
  virtual nn::Matrix token_outputs(const EncodedText& tokens) const = 0;
};

// Intermediate activations kept by forward_pooled for the backward pass.
class ForwardTape {
 public:
  virtual ~ForwardTape() = default;
};

class TrainableEncoder : public SentenceEncoder {
 public:
  // Mean-pooled output for `tokens`; numerically identical to pooling
  // token_outputs(tokens).
  virtual nn::Vector forward_pooled(const EncodedText& tokens,
                                    const PoolingOptions& pooling,
                                    std::unique_ptr<ForwardTape>* tape) const = 0;
  // Accumulates parameter gradients given dL/d(pooled).
  virtual void backward_pooled(const ForwardTape& tape,
                               const Eigen::Ref<const nn::Vector>& grad_pooled) = 0;

  // Mutable views; the cached fingerprint is invalidated on each call.
  virtual std::vector<nn::Parameter> parameters() = 0;
  virtual void zero_grad() = 0;
  virtual std::unique_ptr<TrainableEncoder> clone() const = 0;
  virtual void save(const std::filesystem::path& path) const = 0;
};

struct EncoderSpec {
  std::string model_id = "vinai/bertweet-base";
  std::size_t hidden_dim = 768;
  // 0 selects default_max_tokens(model_id).
  std::size_t max_tokens = 0;
  std::size_t vocab_buckets = 8192;
  std::uint64_t init_seed = 0;
};

// 128 for the tweet-domain checkpoint, 512 otherwise.
std::size_t default_max_tokens(std::string_view model_id);

// Hashed-vocabulary token encoder with one context-mixing layer:
//
//   x_t = E[id_t],  c = mean_t x_t,  o_t = tanh(W x_t + U c + b)
//
// Token ids are <s>=0, </s>=1 and 2 + hash(token) mod (buckets - 2).
// Initial weights are a deterministic function of (model_id, init_seed),
// so a model id always names the same starting point.
class HashedContextEncoder final : public TrainableEncoder {
 public:
  explicit HashedContextEncoder(const EncoderSpec& spec);

  static std::unique_ptr<HashedContextEncoder> load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const override;

  const std::string& model_id() const override { return spec_.model_id; }
  std::size_t hidden_dim() const override { return spec_.hidden_dim; }
  std::size_t max_tokens() const override { return spec_.max_tokens; }
  std::string weights_fingerprint() const override;
  const EncoderSpec& spec() const { return spec_; }

  EncodedText tokenize(std::string_view text) const override;
  nn::Matrix token_outputs(const EncodedText& tokens) const override;

  nn::Vector forward_pooled(const EncodedText& tokens, const PoolingOptions& pooling,
                            std::unique_ptr<ForwardTape>* tape) const override;
  void backward_pooled(const ForwardTape& tape,
                       const Eigen::Ref<const nn::Vector>& grad_pooled) override;

  std::vector<nn::Parameter> parameters() override;
  void zero_grad() override;
  std::unique_ptr<TrainableEncoder> clone() const override;

 private:
  struct Tape;

  nn::Matrix inputs(const EncodedText& tokens) const;

  EncoderSpec spec_;
  nn::Matrix embedding_;  // hidden x buckets, one column per token id
  nn::Matrix token_weight_;
  nn::Matrix context_weight_;
  nn::Vector bias_;
  nn::Matrix grad_embedding_;
  nn::Matrix grad_token_weight_;
  nn::Matrix grad_context_weight_;
  nn::Vector grad_bias_;
  mutable std::optional<std::string> fingerprint_;
};

// Loads `weights` if given, otherwise builds the deterministic initial model.
std::unique_ptr<HashedContextEncoder> make_encoder(
    const EncoderSpec& spec, const std::optional<std::filesystem::path>& weights = {});

}  // namespace scl

#endif  // SCL_ENCODER_HPP_
