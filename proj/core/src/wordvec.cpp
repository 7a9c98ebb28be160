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

#include "scl/wordvec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "scl/errors.hpp"
#include "scl/nn.hpp"
#include "scl/text.hpp"

namespace scl {

WordVectorTable::WordVectorTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0f) {
  if (dim == 0) throw InvalidArgument("word vector dimension must be positive");
}

bool WordVectorTable::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

void WordVectorTable::insert(std::string token, std::span<const float> values) {
  if (values.size() != dim_) {
    throw DimensionError("vector for token '" + token + "' has " +
                         std::to_string(values.size()) + " values, expected " +
                         std::to_string(dim_));
  }
  if (index_.count(token)) throw InvalidArgument("duplicate token '" + token + "'");
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const float> WordVectorTable::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return zero_;
  return std::span<const float>(data_.data() + it->second * dim_, dim_);
}

std::string WordVectorTable::fingerprint() const {
  std::uint64_t h = fnv1a64(std::string_view("scl-wordvec"));
  const std::uint64_t dim = dim_;
  h = fnv1a64(std::as_bytes(std::span(&dim, 1)), h);
  for (const std::string& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  h = fnv1a64(std::as_bytes(std::span(data_)), h);
  return hex64(h);
}

bool operator==(const WordVectorTable& a, const WordVectorTable& b) {
  return a.dim_ == b.dim_ && a.tokens_ == b.tokens_ && a.data_ == b.data_;
}

WordVectorTable read_word_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("malformed header: empty file");
  std::istringstream header(line);
  long long count = -1, dim = -1;
  std::string extra;
  if (!(header >> count >> dim) || (header >> extra) || count < 0 || dim <= 0) {
    throw ParseError("malformed header '" + line + "' (expected '<count> <dim>')");
  }
  WordVectorTable table(static_cast<std::size_t>(dim));
  std::vector<float> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    values.clear();
    std::string v;
    while (fields >> v) {
      char* end = nullptr;
      const float f = std::strtof(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0') {
        throw ParseError("token '" + token + "': bad value '" + v + "'", row + 1);
      }
      values.push_back(f);
    }
    if (values.size() != table.dim()) {
      throw ParseError("token '" + token + "' has " + std::to_string(values.size()) +
                           " values, expected " + std::to_string(table.dim()),
                       row + 1);
    }
    if (table.contains(token)) {
      throw ParseError("duplicate token '" + token + "'", row + 1);
    }
    table.insert(token, values);
  }
  if (table.size() != static_cast<std::size_t>(count)) {
    throw ParseError("header declares " + std::to_string(count) + " tokens, file has " +
                     std::to_string(table.size()));
  }
  return table;
}

WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return read_word_vectors(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.row());
  }
}

void write_word_vectors(std::ostream& out, const WordVectorTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (const std::string& token : table.tokens()) {
    out << token;
    for (float v : table.lookup(token)) {
      std::snprintf(buf, sizeof(buf), " %.6f", static_cast<double>(v));
      out << buf;
    }
    out << '\n';
  }
}

void save_word_vectors(const std::filesystem::path& path, const WordVectorTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_word_vectors(out, table);
  if (!out) throw IoError("failed writing " + path.string());
}

WordVectorTable train_word_vectors(const std::vector<std::string>& corpus,
                                   std::size_t dim, std::uint64_t seed,
                                   const SkipGramOptions& options) {
  if (dim == 0) throw InvalidArgument("word vector dimension must be positive");

  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.size());
  std::map<std::string, std::size_t> counts;
  for (const std::string& text : corpus) {
    sentences.push_back(tokenize_words(text));
    for (const std::string& t : sentences.back()) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> vocab;
  for (const auto& [token, count] : counts) {
    if (count >= std::max<std::size_t>(1, options.min_count)) vocab.emplace_back(token, count);
  }
  if (vocab.empty()) throw InvalidArgument("empty effective vocabulary");
  std::stable_sort(vocab.begin(), vocab.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::unordered_map<std::string, std::size_t> word_index;
  for (std::size_t i = 0; i < vocab.size(); ++i) word_index.emplace(vocab[i].first, i);

  std::vector<std::vector<std::size_t>> encoded;
  std::size_t total_tokens = 0;
  for (const auto& s : sentences) {
    std::vector<std::size_t> ids;
    for (const std::string& t : s) {
      auto it = word_index.find(t);
      if (it != word_index.end()) ids.push_back(it->second);
    }
    total_tokens += ids.size();
    encoded.push_back(std::move(ids));
  }

  // Negative-sampling distribution: unigram counts raised to 0.75.
  std::vector<double> cumulative(vocab.size());
  double acc = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    acc += std::pow(static_cast<double>(vocab[i].second), 0.75);
    cumulative[i] = acc;
  }

  const std::size_t v = vocab.size();
  std::mt19937_64 rng(seed);
  std::vector<float> syn0(v * dim);
  std::vector<float> syn1(v * dim, 0.0f);
  {
    std::uniform_real_distribution<float> init(-0.5f / dim, 0.5f / dim);
    for (float& x : syn0) x = init(rng);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_negative = [&]() {
    const double r = unit(rng) * acc;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), v - 1);
  };

  const std::size_t window = std::max<std::size_t>(1, options.window);
  const double total_steps =
      static_cast<double>(std::max<std::size_t>(1, options.epochs * total_tokens));
  std::vector<double> neu1e(dim);
  std::size_t processed = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& ids : encoded) {
      for (std::size_t pos = 0; pos < ids.size(); ++pos, ++processed) {
        const double lr = std::max(
            options.min_learning_rate,
            options.learning_rate * (1.0 - static_cast<double>(processed) / total_steps));
        const std::size_t reduced = rng() % window;
        const std::size_t span = window - reduced;
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(ids.size() - 1, pos + span);
        const std::size_t center = ids[pos];
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          float* in_vec = &syn0[ids[c] * dim];
          std::fill(neu1e.begin(), neu1e.end(), 0.0);
          for (std::size_t d = 0; d <= options.negative; ++d) {
            std::size_t target;
            double label;
            if (d == 0) {
              target = center;
              label = 1.0;
            } else {
              target = sample_negative();
              if (target == center) continue;
              label = 0.0;
            }
            float* out_vec = &syn1[target * dim];
            double f = 0;
            for (std::size_t k = 0; k < dim; ++k) f += static_cast<double>(in_vec[k]) * out_vec[k];
            const double g = (label - nn::sigmoid(f)) * lr;
            for (std::size_t k = 0; k < dim; ++k) {
              neu1e[k] += g * out_vec[k];
              out_vec[k] += static_cast<float>(g * in_vec[k]);
            }
          }
          for (std::size_t k = 0; k < dim; ++k) in_vec[k] += static_cast<float>(neu1e[k]);
        }
      }
    }
  }

  WordVectorTable table(dim);
  for (std::size_t i = 0; i < v; ++i) {
    table.insert(vocab[i].first, std::span<const float>(&syn0[i * dim], dim));
  }
  return table;
}

std::vector<float> embed_sum(std::string_view text, const WordVectorTable& table) {
  std::vector<double> acc(table.dim(), 0.0);
  for (const std::string& token : tokenize_words(text)) {
    const auto vec = table.lookup(token);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += vec[k];
  }
  return std::vector<float>(acc.begin(), acc.end());
}

std::vector<float> embed_concat(std::string_view text, const WordVectorTable& table,
                                const WordFeatureConfig& cfg) {
  if (cfg.max_words == 0) throw InvalidArgument("max_words must be positive");
  const std::size_t dim = table.dim();
  std::vector<float> out(cfg.max_words * dim, 0.0f);
  const auto tokens = tokenize_words(text);
  const std::size_t n = std::min(tokens.size(), cfg.max_words);
  for (std::size_t slot = 0; slot < n; ++slot) {
    const auto vec = table.lookup(tokens[slot]);
    std::copy(vec.begin(), vec.end(), out.begin() + static_cast<std::ptrdiff_t>(slot * dim));
  }
  return out;
}

std::vector<float> embed_words(std::string_view text, const WordVectorTable& table,
                               const WordFeatureConfig& cfg) {
  return cfg.mode == WordFeatureMode::kSum ? embed_sum(text, table)
                                           : embed_concat(text, table, cfg);
}

}  // namespace scl
