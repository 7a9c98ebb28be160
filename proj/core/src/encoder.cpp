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

#include "scl/encoder.hpp"

#include <cstring>
#include <fstream>
#include <random>

#include "json.hpp"
#include "scl/errors.hpp"
#include "scl/sentenc.hpp"
#include "scl/text.hpp"

namespace scl {
namespace {

constexpr char kMagic[8] = {'S', 'C', 'L', 'E', 'N', 'C', '0', '1'};

}  // namespace

struct HashedContextEncoder::Tape final : ForwardTape {
  EncodedText tokens;
  nn::Matrix inputs;   // T x H
  nn::Vector context;  // H
  nn::Matrix outputs;  // T x H
  std::vector<std::size_t> pooled;
};

std::size_t default_max_tokens(std::string_view model_id) {
  return model_id.find("bertweet") != std::string_view::npos ? 128 : 512;
}

HashedContextEncoder::HashedContextEncoder(const EncoderSpec& spec) : spec_(spec) {
  if (spec_.max_tokens == 0) spec_.max_tokens = default_max_tokens(spec_.model_id);
  if (spec_.hidden_dim == 0) throw InvalidArgument("encoder hidden_dim must be positive");
  if (spec_.max_tokens < 3) throw InvalidArgument("encoder max_tokens must be at least 3");
  if (spec_.vocab_buckets < 3) throw InvalidArgument("encoder vocab_buckets must be at least 3");
  const auto h = static_cast<Eigen::Index>(spec_.hidden_dim);
  const auto v = static_cast<Eigen::Index>(spec_.vocab_buckets);
  embedding_.resize(h, v);
  token_weight_.resize(h, h);
  context_weight_.resize(h, h);
  bias_.resize(h);

  nn::Rng rng(fnv1a64(spec_.model_id) ^ spec_.init_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < embedding_.size(); ++i) embedding_.data()[i] = normal(rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(h));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (Eigen::Index i = 0; i < token_weight_.size(); ++i) token_weight_.data()[i] = uniform(rng);
  for (Eigen::Index i = 0; i < context_weight_.size(); ++i)
    context_weight_.data()[i] = uniform(rng);
  for (Eigen::Index i = 0; i < bias_.size(); ++i) bias_(i) = uniform(rng);

  grad_embedding_ = nn::Matrix::Zero(h, v);
  grad_token_weight_ = nn::Matrix::Zero(h, h);
  grad_context_weight_ = nn::Matrix::Zero(h, h);
  grad_bias_ = nn::Vector::Zero(h);
}

std::unique_ptr<HashedContextEncoder> HashedContextEncoder::load(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read encoder weights " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(path.string() + ": not an encoder weights file");
  }
  std::uint32_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) throw ParseError(path.string() + ": truncated encoder header");
  EncoderSpec spec;
  try {
    const auto j = nlohmann::json::parse(header);
    spec.model_id = j.at("model_id").get<std::string>();
    spec.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    spec.max_tokens = j.at("max_tokens").get<std::size_t>();
    spec.vocab_buckets = j.at("vocab_buckets").get<std::size_t>();
    spec.init_seed = j.at("init_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": bad encoder header: " + e.what());
  }
  auto encoder = std::make_unique<HashedContextEncoder>(spec);
  nn::read_parameters(in, encoder->parameters());
  return encoder;
}

void HashedContextEncoder::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write encoder weights " + path.string());
  const nlohmann::json j = {{"model_id", spec_.model_id},
                            {"hidden_dim", spec_.hidden_dim},
                            {"max_tokens", spec_.max_tokens},
                            {"vocab_buckets", spec_.vocab_buckets},
                            {"init_seed", spec_.init_seed}};
  const std::string header = j.dump();
  const auto header_len = static_cast<std::uint32_t>(header.size());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header.data(), header_len);
  auto* self = const_cast<HashedContextEncoder*>(this);
  const auto cached = fingerprint_;
  nn::write_parameters(out, self->parameters());
  fingerprint_ = cached;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string HashedContextEncoder::weights_fingerprint() const {
  if (!fingerprint_) {
    auto* self = const_cast<HashedContextEncoder*>(this);
    const auto params = self->parameters();
    std::uint64_t h = nn::fingerprint(params);
    h = fnv1a64(spec_.model_id, h);
    fingerprint_ = hex64(h);
  }
  return *fingerprint_;
}

EncodedText HashedContextEncoder::tokenize(std::string_view text) const {
  const auto words = tokenize_words(text);
  const std::size_t limit = spec_.max_tokens - 2;
  const std::size_t n = std::min(words.size(), limit);
  const std::uint64_t salt = fnv1a64(spec_.model_id);
  EncodedText out;
  out.truncated = words.size() > limit;
  out.ids.reserve(n + 2);
  out.ids.push_back(0);
  out.special.push_back(true);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bucket = fnv1a64(words[i], salt) % (spec_.vocab_buckets - 2);
    out.ids.push_back(static_cast<std::int32_t>(2 + bucket));
    out.special.push_back(false);
  }
  out.ids.push_back(1);
  out.special.push_back(true);
  return out;
}

nn::Matrix HashedContextEncoder::inputs(const EncodedText& tokens) const {
  nn::Matrix x(static_cast<Eigen::Index>(tokens.ids.size()), embedding_.rows());
  for (std::size_t t = 0; t < tokens.ids.size(); ++t) {
    const std::int32_t id = tokens.ids[t];
    if (id < 0 || static_cast<std::size_t>(id) >= spec_.vocab_buckets) {
      throw InvalidArgument("token id out of range");
    }
    x.row(static_cast<Eigen::Index>(t)) = embedding_.col(id).transpose();
  }
  return x;
}

nn::Matrix HashedContextEncoder::token_outputs(const EncodedText& tokens) const {
  const nn::Matrix x = inputs(tokens);
  const nn::Vector context = x.colwise().mean().transpose();
  const nn::Vector shift = context_weight_ * context + bias_;
  nn::Matrix pre = x * token_weight_.transpose();
  pre.rowwise() += shift.transpose();
  return pre.array().tanh().matrix();
}

nn::Vector HashedContextEncoder::forward_pooled(const EncodedText& tokens,
                                                const PoolingOptions& pooling,
                                                std::unique_ptr<ForwardTape>* tape) const {
  if (tokens.ids.empty()) throw InvalidArgument("cannot encode an empty token sequence");
  auto t = std::make_unique<Tape>();
  t->tokens = tokens;
  t->inputs = inputs(tokens);
  t->context = t->inputs.colwise().mean().transpose();
  const nn::Vector shift = context_weight_ * t->context + bias_;
  nn::Matrix pre = t->inputs * token_weight_.transpose();
  pre.rowwise() += shift.transpose();
  t->outputs = pre.array().tanh().matrix();
  t->pooled = pooled_positions(tokens, pooling);
  nn::Vector pooled = mean_pool(t->outputs, tokens, pooling);
  if (tape != nullptr) *tape = std::move(t);
  return pooled;
}

void HashedContextEncoder::backward_pooled(const ForwardTape& base,
                                           const Eigen::Ref<const nn::Vector>& grad_pooled) {
  const auto& t = dynamic_cast<const Tape&>(base);
  const Eigen::Index len = t.outputs.rows();
  nn::Matrix grad_pre = nn::Matrix::Zero(len, t.outputs.cols());
  const double share = 1.0 / static_cast<double>(t.pooled.size());
  for (std::size_t r : t.pooled) {
    const auto row = static_cast<Eigen::Index>(r);
    grad_pre.row(row) = (grad_pooled.transpose() * share).array() *
                        (1.0 - t.outputs.row(row).array().square());
  }
  const nn::Vector grad_shift = grad_pre.colwise().sum().transpose();
  grad_token_weight_.noalias() += grad_pre.transpose() * t.inputs;
  grad_context_weight_.noalias() += grad_shift * t.context.transpose();
  grad_bias_ += grad_shift;
  nn::Matrix grad_x = grad_pre * token_weight_;
  const nn::Vector grad_context = context_weight_.transpose() * grad_shift;
  grad_x.rowwise() += (grad_context / static_cast<double>(len)).transpose();
  for (Eigen::Index r = 0; r < len; ++r) {
    grad_embedding_.col(t.tokens.ids[static_cast<std::size_t>(r)]) += grad_x.row(r).transpose();
  }
}

std::vector<nn::Parameter> HashedContextEncoder::parameters() {
  fingerprint_.reset();
  return {
      {"embedding", embedding_.data(), grad_embedding_.data(),
       static_cast<std::size_t>(embedding_.size())},
      {"token_weight", token_weight_.data(), grad_token_weight_.data(),
       static_cast<std::size_t>(token_weight_.size())},
      {"context_weight", context_weight_.data(), grad_context_weight_.data(),
       static_cast<std::size_t>(context_weight_.size())},
      {"bias", bias_.data(), grad_bias_.data(), static_cast<std::size_t>(bias_.size())},
  };
}

void HashedContextEncoder::zero_grad() {
  grad_embedding_.setZero();
  grad_token_weight_.setZero();
  grad_context_weight_.setZero();
  grad_bias_.setZero();
}

std::unique_ptr<TrainableEncoder> HashedContextEncoder::clone() const {
  return std::make_unique<HashedContextEncoder>(*this);
}

std::unique_ptr<HashedContextEncoder> make_encoder(
    const EncoderSpec& spec, const std::optional<std::filesystem::path>& weights) {
  if (weights) {
    auto encoder = HashedContextEncoder::load(*weights);
    if (encoder->model_id() != spec.model_id ||
        encoder->hidden_dim() != spec.hidden_dim) {
      throw ConfigError("weights in " + weights->string() + " belong to '" +
                        encoder->model_id() + "' (dim " +
                        std::to_string(encoder->hidden_dim()) + "), expected '" +
                        spec.model_id + "' (dim " + std::to_string(spec.hidden_dim) + ")");
    }
    return encoder;
  }
  return std::make_unique<HashedContextEncoder>(spec);
}

}  // namespace scl
