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

#include "scl/synthetic.hpp"

#include <array>
#include <cstdio>
#include <random>

namespace scl {
namespace {

constexpr std::array kPositiveVerbs = {
    "love", "adore", "enjoy", "am thrilled about", "can't wait for", "really appreciate",
    "am so excited about", "live for",
};
constexpr std::array kNegativeVerbs = {
    "hate", "dread", "can't stand", "despise", "am sick of", "am tired of",
    "really resent", "am fed up with",
};
constexpr std::array kNegativeSituations = {
    "waiting in traffic for hours", "my flight getting cancelled", "working all weekend",
    "monday morning meetings", "a flat tire in the rain", "spilling coffee on my laptop",
    "getting stuck in the elevator", "the wifi dying again", "doing my taxes",
    "a three hour layover", "being put on hold", "cold leftovers for dinner",
    "my alarm not going off", "the printer jamming", "losing my keys",
    "a surprise pop quiz", "the bus leaving without me", "a dentist appointment",
    "getting rained on", "my phone battery dying", "an inbox full of spam",
    "running out of coffee", "a noisy neighbor at 3am", "paying parking tickets",
};
constexpr std::array kPositiveSituations = {
    "a sunny day at the beach", "free pizza at lunch", "a long weekend",
    "getting a raise", "fresh coffee in the morning", "my best friend visiting",
    "a quiet evening with a book", "the new season of my show", "a warm cup of tea",
    "finishing the project early", "a surprise birthday party", "sleeping in on sunday",
    "a walk in the park", "homemade cookies", "the concert tonight",
    "a good night of sleep", "my dog greeting me", "a road trip with friends",
    "finding money in my coat", "the first snow of winter", "a clean kitchen",
    "an empty inbox", "a hot shower after the gym", "a thank you note",
};
constexpr std::array kNegativeAdjectives = {
    "awful", "terrible", "exhausting", "frustrating", "the worst", "annoying",
};
constexpr std::array kMarkers = {
    "oh great", "wow", "yeah", "just", "totally", "oh joy",
};
constexpr std::array kSuffixes = {
    "#blessed", "so much fun", "best day ever", "can't get enough", "what a treat", "lucky me",
};

template <typename Array>
const char* pick(const Array& items, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

bool coin(double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  return d(rng) < p;
}

std::string decorate(std::string core, double marker_rate, std::mt19937_64& rng) {
  if (coin(marker_rate, rng)) core = std::string(pick(kMarkers, rng)) + " " + core;
  if (coin(marker_rate, rng)) core += std::string(" ") + pick(kSuffixes, rng);
  return core;
}

std::string make_id(const std::string& prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", i);
  return prefix + "-" + buf;
}

}  // namespace

std::vector<LabeledText> synthetic_corpus(const SyntheticCorpusOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<LabeledText> out;
  out.reserve(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) {
    const bool sarcastic = coin(options.sarcastic_fraction, rng);
    std::string text;
    if (sarcastic) {
      text = decorate(std::string("i ") + pick(kPositiveVerbs, rng) + " " +
                          pick(kNegativeSituations, rng),
                      0.5, rng);
    } else if (coin(0.5, rng)) {
      text = decorate(std::string("i ") + pick(kPositiveVerbs, rng) + " " +
                          pick(kPositiveSituations, rng),
                      0.15, rng);
    } else {
      text = decorate(std::string("i ") + pick(kNegativeVerbs, rng) + " " +
                          pick(kNegativeSituations, rng),
                      0.15, rng);
    }
    Label label = sarcastic ? Label::kSarcastic : Label::kNonSarcastic;
    if (options.label_noise > 0 && coin(options.label_noise, rng)) {
      label = sarcastic ? Label::kNonSarcastic : Label::kSarcastic;
    }
    out.push_back({make_id(options.id_prefix, i + 1), std::move(text), label, options.source});
  }
  return out;
}

std::vector<TranslationPair> synthetic_translation_pairs(const SyntheticPairOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<TranslationPair> out;
  out.reserve(options.pairs);
  const std::size_t max_t = std::max<std::size_t>(1, options.max_translations);
  for (std::size_t i = 0; i < options.pairs; ++i) {
    const std::string situation = pick(kNegativeSituations, rng);
    TranslationPair pair;
    pair.pair_id = make_id("pair", i + 1);
    pair.sarcastic = decorate(std::string("i ") + pick(kPositiveVerbs, rng) + " " + situation,
                              0.7, rng);
    std::uniform_int_distribution<std::size_t> count(1, max_t);
    const std::size_t n = count(rng);
    for (std::size_t k = 0; k < n; ++k) {
      switch (rng() % 3) {
        case 0:
          pair.non_sarcastic.push_back(std::string("i ") + pick(kNegativeVerbs, rng) + " " +
                                       situation);
          break;
        case 1:
          pair.non_sarcastic.push_back(situation + " is " + pick(kNegativeAdjectives, rng));
          break;
        default:
          pair.non_sarcastic.push_back(std::string("honestly i ") + pick(kNegativeVerbs, rng) +
                                       " " + situation);
          break;
      }
    }
    if (coin(options.duplicate_rate, rng)) {
      const std::string& dup = pair.non_sarcastic[rng() % pair.non_sarcastic.size()];
      pair.non_sarcastic.push_back(coin(0.5, rng) ? dup : " " + dup + " ");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace scl
