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

// Shared fixtures for the unit tests.

#ifndef SCL_TESTS_TEST_UTIL_HPP_
#define SCL_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scl/corpus.hpp"
#include "scl/encoder.hpp"
#include "scl/text.hpp"

namespace scl::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("scl-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Frozen encoder whose token outputs come from a lookup table keyed by
// whitespace-separated words. Unknown words map to `fallback`. Counts calls.
class StubEncoder final : public SentenceEncoder {
 public:
  StubEncoder(std::size_t dim, std::map<std::string, std::vector<double>> table,
              std::size_t max_tokens = 64)
      : dim_(dim), max_tokens_(max_tokens), table_(std::move(table)) {
    for (auto& [word, vec] : table_) words_.push_back(word);
  }

  const std::string& model_id() const override { return id_; }
  std::size_t hidden_dim() const override { return dim_; }
  std::size_t max_tokens() const override { return max_tokens_; }
  std::string weights_fingerprint() const override { return "stub"; }

  EncodedText tokenize(std::string_view text) const override {
    EncodedText out;
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) {
      if (out.ids.size() == max_tokens_) {
        out.truncated = true;
        break;
      }
      auto it = std::find(words_.begin(), words_.end(), w);
      out.ids.push_back(it == words_.end() ? -1 : static_cast<std::int32_t>(it - words_.begin()));
      out.special.push_back(false);
    }
    return out;
  }

  nn::Matrix token_outputs(const EncodedText& tokens) const override {
    ++calls;
    nn::Matrix m(static_cast<Eigen::Index>(tokens.ids.size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t t = 0; t < tokens.ids.size(); ++t) {
      const std::vector<double>& v =
          tokens.ids[t] < 0 ? fallback : table_.at(words_[static_cast<std::size_t>(tokens.ids[t])]);
      for (std::size_t k = 0; k < dim_; ++k) {
        m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = v[k];
      }
    }
    return m;
  }

  std::vector<double> fallback;
  mutable std::size_t calls = 0;

 private:
  std::string id_ = "stub/encoder";
  std::size_t dim_;
  std::size_t max_tokens_;
  std::map<std::string, std::vector<double>> table_;
  std::vector<std::string> words_;
};

// Central finite difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const nn::Vector&)>& f,
                                 nn::Vector x, Eigen::Index i, double h = 1e-4) {
  const double orig = x(i);
  x(i) = orig + h;
  const double up = f(x);
  x(i) = orig - h;
  const double down = f(x);
  return (up - down) / (2 * h);
}

// Relative error with an absolute floor, so tiny gradients compare sanely.
inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1e-6, std::abs(analytic), std::abs(numeric)});
}

inline nn::Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  nn::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

// Translation pairs with exact, whitespace-padded and NFC-variant
// duplicates, empty entries, and pairs made only of duplicates.
inline std::vector<TranslationPair> fuzzed_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> vocab = {"great", "job", "nice", "work", "caf\xC3\xA9",
                                          "cafe\xCC\x81", "not", "really", "so", "fun", "!"};
  auto phrase = [&] {
    std::string s;
    const std::size_t len = 1 + rng() % 3;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) s += ' ';
      s += vocab[rng() % vocab.size()];
    }
    return s;
  };
  std::vector<TranslationPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    TranslationPair p;
    p.pair_id = "p" + std::to_string(i);
    p.sarcastic = "oh " + phrase();
    const std::size_t m = rng() % 5;
    for (std::size_t k = 0; k < m; ++k) {
      switch (rng() % 5) {
        case 0:
          if (!p.non_sarcastic.empty()) {
            p.non_sarcastic.push_back(p.non_sarcastic[rng() % p.non_sarcastic.size()]);
            break;
          }
          [[fallthrough]];
        case 1:
          if (!p.non_sarcastic.empty()) {
            p.non_sarcastic.push_back("  " + p.non_sarcastic[rng() % p.non_sarcastic.size()] +
                                      "\t");
            break;
          }
          [[fallthrough]];
        case 2:
          p.non_sarcastic.push_back(rng() % 4 == 0 ? "   " : phrase());
          break;
        default:
          p.non_sarcastic.push_back(phrase());
          break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace scl::testing

#endif  // SCL_TESTS_TEST_UTIL_HPP_
