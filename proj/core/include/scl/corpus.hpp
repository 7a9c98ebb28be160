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

// Labeled sarcasm corpora, sarcastic/non-sarcastic translation pairs, and
// the triplets used for contrastive fine-tuning.

#ifndef SCL_CORPUS_HPP_
#define SCL_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scl/types.hpp"

namespace scl {

struct LabeledText {
  std::string id;
  std::string text;
  Label label = Label::kNonSarcastic;
  std::string source;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

// One sarcastic text and its direct non-sarcastic translations.
struct TranslationPair {
  std::string pair_id;
  std::string sarcastic;
  std::vector<std::string> non_sarcastic;

  friend bool operator==(const TranslationPair&, const TranslationPair&) = default;
};

// anchor: a non-sarcastic translation; positive: a non-sarcastic text from
// a different pair; negative: the sarcastic text of the anchor's pair.
struct TripletExample {
  std::string anchor;
  std::string positive;
  std::string negative;
  std::string anchor_pair_id;
  std::string positive_pair_id;

  friend bool operator==(const TripletExample&, const TripletExample&) = default;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  std::vector<LabeledText> train;
  std::vector<LabeledText> validation;
  std::vector<LabeledText> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

// Ids per split; persisted as JSON so a split can be pinned explicitly.
struct SplitManifest {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

enum class TextFormat { kCsv, kTsv, kJsonl };

TextFormat parse_text_format(std::string_view name);
std::string_view text_format_name(TextFormat format);

// Columns/fields: optional `id`, `text`, `label`. Rows without an id column
// get `row-<n>` (1-based data row). Errors carry the data row number.
std::vector<LabeledText> parse_labeled(std::istream& in, TextFormat format,
                                       const std::string& source = "");
std::vector<LabeledText> load_labeled(const std::filesystem::path& path,
                                      TextFormat format,
                                      const std::string& source = "");

// Writes `id`, `text`, `label` (label as 0/1).
void write_labeled(std::ostream& out, const std::vector<LabeledText>& records,
                   TextFormat format);
void save_labeled(const std::filesystem::path& path,
                  const std::vector<LabeledText>& records, TextFormat format);

// JSONL, one object per line: {"pair_id"?, "sarcastic", "non_sarcastic": [...]}.
std::vector<TranslationPair> parse_translations(std::istream& in);
std::vector<TranslationPair> load_translations(const std::filesystem::path& path);
void write_translations(std::ostream& out, const std::vector<TranslationPair>& pairs);

// Exact-match dedup on NFC-normalized, trimmed text, first occurrence kept.
// Pairs left without translations are dropped; pair order is preserved.
std::vector<TranslationPair> dedup_translations(std::vector<TranslationPair> pairs);

// One triplet per (pair, translation); the positive is drawn uniformly from
// translations of all other pairs. Deterministic for a fixed seed.
std::vector<TripletExample> build_triplets(const std::vector<TranslationPair>& pairs,
                                           std::uint64_t seed);

void write_triplets(std::ostream& out, const std::vector<TripletExample>& triplets);
std::vector<TripletExample> parse_triplets(std::istream& in);

// Seeded shuffle then contiguous train/validation/test partition. Validation
// and test sizes are floor(n * ratio); the remainder goes to train.
CorpusSplit split(const std::vector<LabeledText>& corpus, const SplitRatios& ratios,
                  std::uint64_t seed);

SplitManifest manifest_of(const CorpusSplit& split);
// Rebuilds a split from pinned ids. Every corpus id must be listed exactly once.
CorpusSplit apply_manifest(const std::vector<LabeledText>& corpus,
                           const SplitManifest& manifest);

void write_split_manifest(const std::filesystem::path& path,
                          const SplitManifest& manifest);
SplitManifest read_split_manifest(const std::filesystem::path& path);

}  // namespace scl

#endif  // SCL_CORPUS_HPP_
