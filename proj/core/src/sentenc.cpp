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

#include "scl/sentenc.hpp"

#include <cmath>

#include "scl/errors.hpp"
#include "scl/text.hpp"

namespace scl {

std::vector<std::size_t> pooled_positions(const EncodedText& tokens,
                                          const PoolingOptions& pooling) {
  std::vector<std::size_t> out;
  out.reserve(tokens.ids.size());
  for (std::size_t i = 0; i < tokens.ids.size(); ++i) {
    const bool special = i < tokens.special.size() && tokens.special[i];
    if (!pooling.exclude_special_tokens || !special) out.push_back(i);
  }
  if (out.empty()) {
    for (std::size_t i = 0; i < tokens.ids.size(); ++i) out.push_back(i);
  }
  return out;
}

nn::Vector mean_pool(const nn::Matrix& outputs, const EncodedText& tokens,
                     const PoolingOptions& pooling) {
  const auto rows = pooled_positions(tokens, pooling);
  if (rows.empty()) throw InvalidArgument("cannot pool an empty token sequence");
  nn::Vector sum = nn::Vector::Zero(outputs.cols());
  for (std::size_t r : rows) sum += outputs.row(static_cast<Eigen::Index>(r)).transpose();
  return sum / static_cast<double>(rows.size());
}

std::vector<float> encode_sentence(const SentenceEncoder& encoder, std::string_view text,
                                   const PoolingOptions& pooling,
                                   EncodeCounters* counters) {
  if (trim(text).empty()) throw InvalidArgument("cannot encode empty text");
  const EncodedText tokens = encoder.tokenize(text);
  if (tokens.ids.empty()) throw InvalidArgument("tokenizer produced no tokens");
  const nn::Matrix outputs = encoder.token_outputs(tokens);
  if (static_cast<std::size_t>(outputs.cols()) != encoder.hidden_dim() ||
      static_cast<std::size_t>(outputs.rows()) != tokens.ids.size()) {
    throw DimensionError("encoder '" + encoder.model_id() +
                         "' returned outputs of the wrong shape");
  }
  const nn::Vector pooled = mean_pool(outputs, tokens, pooling);
  std::vector<float> out(pooled.size());
  for (Eigen::Index i = 0; i < pooled.size(); ++i) {
    out[i] = static_cast<float>(pooled(i));
    if (!std::isfinite(out[i])) {
      throw NumericalError("encoder '" + encoder.model_id() + "' produced a non-finite output",
                           0);
    }
  }
  if (counters != nullptr) {
    ++counters->texts;
    ++counters->encoder_invocations;
    if (tokens.truncated) ++counters->truncated;
  }
  return out;
}

std::vector<std::vector<float>> encode_batch(const SentenceEncoder& encoder,
                                             const std::vector<std::string>& texts,
                                             std::size_t batch_size,
                                             const PoolingOptions& pooling,
                                             EncodeCounters* counters) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    for (std::size_t i = start; i < end; ++i) {
      try {
        out.push_back(encode_sentence(encoder, texts[i], pooling, counters));
      } catch (const Error& e) {
        throw Error(e.code(), "text " + std::to_string(i) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace scl
