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

// Word-level featurization: word vector tables and text -> fixed-length
// vectors by summing token vectors or concatenating them up to a word cap.

#ifndef SCL_WORDVEC_HPP_
#define SCL_WORDVEC_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace scl {

// Immutable once built. Absent tokens look up as the zero vector.
class WordVectorTable {
 public:
  explicit WordVectorTable(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;

  // Throws DimensionError if values.size() != dim, InvalidArgument on a
  // duplicate token.
  void insert(std::string token, std::span<const float> values);

  std::span<const float> lookup(std::string_view token) const;

  // Tokens in insertion order.
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Hash of tokens and values; identifies the table in cache keys.
  std::string fingerprint() const;

  friend bool operator==(const WordVectorTable& a, const WordVectorTable& b);

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> zero_;
};

// word2vec text format: "<count> <dim>" then "<token> v1 ... v_dim".
WordVectorTable read_word_vectors(std::istream& in);
WordVectorTable load_word_vectors(const std::filesystem::path& path);
// Values printed with 6 decimal digits.
void write_word_vectors(std::ostream& out, const WordVectorTable& table);
void save_word_vectors(const std::filesystem::path& path, const WordVectorTable& table);

struct SkipGramOptions {
  std::size_t window = 5;
  std::size_t negative = 5;
  std::size_t epochs = 5;
  std::size_t min_count = 1;
  double learning_rate = 0.025;
  double min_learning_rate = 0.0001;
};

// Skip-gram with negative sampling, single worker. Vocabulary is ordered by
// descending count, ties broken lexicographically.
WordVectorTable train_word_vectors(const std::vector<std::string>& corpus,
                                   std::size_t dim, std::uint64_t seed,
                                   const SkipGramOptions& options = {});

enum class WordFeatureMode { kSum, kConcatPad };

struct WordFeatureConfig {
  WordFeatureMode mode = WordFeatureMode::kConcatPad;
  std::size_t max_words = 50;

  std::size_t output_dim(std::size_t word_dim) const {
    return mode == WordFeatureMode::kSum ? word_dim : max_words * word_dim;
  }
};

std::vector<float> embed_sum(std::string_view text, const WordVectorTable& table);

// Slot k holds the vector of token k for k < min(n_tokens, max_words);
// the remaining slots are zero.
std::vector<float> embed_concat(std::string_view text, const WordVectorTable& table,
                                const WordFeatureConfig& cfg);

std::vector<float> embed_words(std::string_view text, const WordVectorTable& table,
                               const WordFeatureConfig& cfg);

}  // namespace scl

#endif  // SCL_WORDVEC_HPP_
