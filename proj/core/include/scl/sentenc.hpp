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

// Sentence embeddings: mean pooling of encoder token outputs.

#ifndef SCL_SENTENC_HPP_
#define SCL_SENTENC_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "scl/encoder.hpp"

namespace scl {

struct EncodeCounters {
  std::size_t texts = 0;
  std::size_t truncated = 0;
  std::size_t encoder_invocations = 0;
};

// Positions that take part in pooling. With exclude_special_tokens, special
// positions are skipped unless nothing else remains.
std::vector<std::size_t> pooled_positions(const EncodedText& tokens,
                                          const PoolingOptions& pooling);

// Arithmetic mean of the selected rows of `outputs`.
nn::Vector mean_pool(const nn::Matrix& outputs, const EncodedText& tokens,
                     const PoolingOptions& pooling);

// Tokenize, truncate, run the encoder and mean-pool. Truncation is silent
// but counted. Throws InvalidArgument on empty text and NumericalError on
// non-finite output.
std::vector<float> encode_sentence(const SentenceEncoder& encoder, std::string_view text,
                                   const PoolingOptions& pooling = {},
                                   EncodeCounters* counters = nullptr);

// Output order matches input order; errors name the failing index.
std::vector<std::vector<float>> encode_batch(const SentenceEncoder& encoder,
                                             const std::vector<std::string>& texts,
                                             std::size_t batch_size,
                                             const PoolingOptions& pooling = {},
                                             EncodeCounters* counters = nullptr);

}  // namespace scl

#endif  // SCL_SENTENC_HPP_
