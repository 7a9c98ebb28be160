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

// Synthetic sentiment-contrast data for desk-scale runs.
//
// Sarcastic samples pair positive sentiment with a negative situation
// ("i love waiting in traffic for hours"); non-sarcastic samples keep the
// two congruent. Translation pairs map a sarcastic sentence to literal
// restatements, with deliberate duplicates.

#ifndef SCL_SYNTHETIC_HPP_
#define SCL_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "scl/corpus.hpp"

namespace scl {

struct SyntheticCorpusOptions {
  std::size_t samples = 2000;
  double sarcastic_fraction = 0.5;
  // Probability of flipping a label after generation.
  double label_noise = 0.0;
  std::uint64_t seed = 0;
  std::string id_prefix = "syn";
  std::string source = "synthetic";
};

std::vector<LabeledText> synthetic_corpus(const SyntheticCorpusOptions& options);

struct SyntheticPairOptions {
  std::size_t pairs = 300;
  std::size_t max_translations = 3;
  // Probability that a pair carries an exact or whitespace-variant duplicate.
  double duplicate_rate = 0.3;
  std::uint64_t seed = 0;
};

std::vector<TranslationPair> synthetic_translation_pairs(const SyntheticPairOptions& options);

}  // namespace scl

#endif  // SCL_SYNTHETIC_HPP_
