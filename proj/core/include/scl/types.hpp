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

#ifndef SCL_TYPES_HPP_
#define SCL_TYPES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scl {

// SARCASTIC is the positive class everywhere (encoded as 1).
enum class Label : std::uint8_t { kNonSarcastic = 0, kSarcastic = 1 };

inline constexpr int label_value(Label label) {
  return label == Label::kSarcastic ? 1 : 0;
}
inline constexpr Label label_from_int(int v) {
  return v != 0 ? Label::kSarcastic : Label::kNonSarcastic;
}

std::string_view label_name(Label label);

// Parses 0/1 and the case-insensitive names sarcasm, sarcastic,
// non-sarcasm, non_sarcasm, non-sarcastic, non_sarcastic.
std::optional<Label> parse_label(std::string_view text);

// Context-injection methods, in the canonical "preceding method" order.
enum class MethodTag : std::uint8_t {
  kA1 = 0,
  kA2Generic = 1,
  kA2Tweet = 2,
  kA3 = 3,
  kA4 = 4,
};

inline constexpr std::array<MethodTag, 5> kCanonicalMethodOrder = {
    MethodTag::kA1, MethodTag::kA2Generic, MethodTag::kA2Tweet,
    MethodTag::kA3, MethodTag::kA4};

std::string_view method_name(MethodTag tag);
std::optional<MethodTag> parse_method(std::string_view text);
// Throws ConfigError for unknown tags.
MethodTag parse_method_or_throw(std::string_view text);

}  // namespace scl

#endif  // SCL_TYPES_HPP_
