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

// Unicode text helpers and content hashing.

#ifndef SCL_TEXT_HPP_
#define SCL_TEXT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scl {

// NFC normalization of UTF-8 text. Invalid sequences become U+FFFD.
std::string nfc(std::string_view utf8);

// Strips leading and trailing Unicode whitespace.
std::string trim(std::string_view utf8);

// nfc(trim(text)); the key used for dedup and text hashing.
std::string normalize_text(std::string_view utf8);

// Lowercase, split on Unicode whitespace, strip leading/trailing
// punctuation from each token. Tokens that are pure punctuation vanish.
std::vector<std::string> tokenize_words(std::string_view utf8);

std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                      std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t fnv1a64(std::string_view text,
                      std::uint64_t seed = 14695981039346656037ULL);

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

// Hash of normalize_text(text), hex encoded.
std::string text_hash(std::string_view utf8);

std::uint32_t crc32(std::span<const std::byte> bytes, std::uint32_t seed = 0);

}  // namespace scl

#endif  // SCL_TEXT_HPP_
