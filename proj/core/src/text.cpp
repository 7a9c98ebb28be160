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

#include "scl/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <zlib.h>

#include <algorithm>
#include <cstdio>

#include "scl/errors.hpp"

namespace scl {
namespace {

const icu::Normalizer2& nfc_normalizer() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error("icu_error", "cannot load ICU NFC normalizer");
  }
  return *norm;
}

icu::UnicodeString to_unicode(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string to_utf8(const icu::UnicodeString& text) {
  std::string out;
  text.toUTF8String(out);
  return out;
}

icu::UnicodeString normalize(const icu::UnicodeString& text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc_normalizer().normalize(text, status);
  if (U_FAILURE(status)) throw Error("icu_error", "NFC normalization failed");
  return out;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  return to_utf8(normalize(to_unicode(utf8)));
}

std::string trim(std::string_view utf8) {
  const icu::UnicodeString u = to_unicode(utf8);
  int32_t begin = 0;
  int32_t end = u.length();
  while (begin < end && u_isUWhiteSpace(u.char32At(begin))) {
    begin = u.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = u.moveIndex32(end, -1);
    if (!u_isUWhiteSpace(u.char32At(prev))) break;
    end = prev;
  }
  return to_utf8(u.tempSubStringBetween(begin, end));
}

std::string normalize_text(std::string_view utf8) { return nfc(trim(utf8)); }

std::vector<std::string> tokenize_words(std::string_view utf8) {
  icu::UnicodeString u = normalize(to_unicode(utf8));
  u.toLower(icu::Locale::getRoot());
  std::vector<std::string> tokens;
  const int32_t n = u.length();
  int32_t i = 0;
  while (i < n) {
    while (i < n && u_isUWhiteSpace(u.char32At(i))) i = u.moveIndex32(i, 1);
    int32_t j = i;
    while (j < n && !u_isUWhiteSpace(u.char32At(j))) j = u.moveIndex32(j, 1);
    int32_t b = i;
    int32_t e = j;
    while (b < e && u_ispunct(u.char32At(b))) b = u.moveIndex32(b, 1);
    while (e > b) {
      const int32_t prev = u.moveIndex32(e, -1);
      if (!u_ispunct(u.char32At(prev))) break;
      e = prev;
    }
    if (b < e) tokens.push_back(to_utf8(u.tempSubStringBetween(b, e)));
    i = j;
  }
  return tokens;
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed) {
  return fnv1a64(std::as_bytes(std::span(text.data(), text.size())), seed);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string text_hash(std::string_view utf8) {
  return hex64(fnv1a64(normalize_text(utf8)));
}

std::uint32_t crc32(std::span<const std::byte> bytes, std::uint32_t seed) {
  uLong crc = seed;
  const auto* data = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t remaining = bytes.size();
  while (remaining > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(remaining, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    remaining -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace scl
