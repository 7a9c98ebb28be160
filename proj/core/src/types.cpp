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

#include "scl/types.hpp"

#include <algorithm>
#include <cctype>

#include "scl/errors.hpp"

namespace scl {
namespace {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view strip_ascii_space(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return text;
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kSarcastic ? "SARCASTIC" : "NON_SARCASTIC";
}

std::optional<Label> parse_label(std::string_view text) {
  const std::string v = ascii_lower(strip_ascii_space(text));
  if (v == "1" || v == "sarcasm" || v == "sarcastic") return Label::kSarcastic;
  if (v == "0" || v == "non-sarcasm" || v == "non_sarcasm" ||
      v == "non-sarcastic" || v == "non_sarcastic") {
    return Label::kNonSarcastic;
  }
  return std::nullopt;
}

std::string_view method_name(MethodTag tag) {
  switch (tag) {
    case MethodTag::kA1: return "A1";
    case MethodTag::kA2Generic: return "A2_GENERIC";
    case MethodTag::kA2Tweet: return "A2_TWEET";
    case MethodTag::kA3: return "A3";
    case MethodTag::kA4: return "A4";
  }
  return "?";
}

std::optional<MethodTag> parse_method(std::string_view text) {
  std::string v(strip_ascii_space(text));
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  std::replace(v.begin(), v.end(), '-', '_');
  for (MethodTag tag : kCanonicalMethodOrder) {
    if (v == method_name(tag)) return tag;
  }
  return std::nullopt;
}

MethodTag parse_method_or_throw(std::string_view text) {
  if (auto tag = parse_method(text)) return *tag;
  throw ConfigError("unknown method tag '" + std::string(text) +
                    "' (expected A1, A2_GENERIC, A2_TWEET, A3 or A4)");
}

}  // namespace scl
