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

// Persistent embedding cache.
//
// The file is a sequence of little-endian records
//
//   u32 key_len | key bytes | u32 dim | dim x f32 | u32 crc32
//
// where the checksum covers every preceding byte of the record. Records are
// only ever appended; when a key occurs more than once the last record wins.
// The in-memory index is rebuilt by scanning the file on open.

#ifndef SCL_CACHE_HPP_
#define SCL_CACHE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scl/types.hpp"

namespace scl {

struct RecordKey {
  MethodTag method = MethodTag::kA1;
  std::string model_id;
  std::string weights_fingerprint;
  // text_hash() of the embedded text.
  std::string text_hash;

  std::string encode() const;
  static RecordKey decode(std::string_view bytes);

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
};

struct EmbeddingRecord {
  std::vector<float> vector;
  RecordKey key;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t computed = 0;
  std::size_t corrupt = 0;
};

class EmbeddingCache {
 public:
  enum class Mode { kReadOnly, kReadWrite };

  // Creates the file (and parent directories) in read-write mode.
  static EmbeddingCache open(const std::filesystem::path& path, Mode mode);

  EmbeddingCache(EmbeddingCache&& other) noexcept;
  EmbeddingCache& operator=(EmbeddingCache&& other) noexcept;
  EmbeddingCache(const EmbeddingCache&) = delete;
  EmbeddingCache& operator=(const EmbeddingCache&) = delete;
  ~EmbeddingCache();

  // nullopt when absent or when the stored record fails its checksum.
  std::optional<std::vector<float>> find(const RecordKey& key);
  bool contains(const RecordKey& key) const;

  // Appends a record under an exclusive file lock.
  void put(const RecordKey& key, std::span<const float> vector);

  // Returns the stored vector, or computes, persists and returns it. A
  // corrupt entry is recomputed and superseded with a warning on stderr.
  EmbeddingRecord get_or_compute(const RecordKey& key,
                                 const std::function<std::vector<float>()>& compute);

  std::size_t size() const { return index_.size(); }
  const CacheStats& stats() const { return stats_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  struct Entry {
    std::uint64_t offset = 0;  // start of the float payload
    std::uint32_t dim = 0;
    bool corrupt = false;
  };

  EmbeddingCache(std::filesystem::path path, int fd, Mode mode);
  void scan();
  std::optional<std::vector<float>> read_entry(const std::string& key, const Entry& e);

  std::filesystem::path path_;
  int fd_ = -1;
  Mode mode_ = Mode::kReadOnly;
  std::unordered_map<std::string, Entry> index_;
  std::uint64_t valid_end_ = 0;
  std::uint64_t scanned_size_ = 0;
  CacheStats stats_;
};

}  // namespace scl

#endif  // SCL_CACHE_HPP_
