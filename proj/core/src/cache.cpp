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

#include "scl/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <utility>

#include "scl/errors.hpp"
#include "scl/text.hpp"

namespace scl {
namespace {

constexpr char kSep = '\x1f';
constexpr std::uint32_t kMaxKeyLen = 1u << 16;
constexpr std::uint32_t kMaxDim = 1u << 26;

// Holds an flock for the lifetime of the object.
class FileLock {
 public:
  FileLock(int fd, int op) : fd_(fd) {
    while (::flock(fd_, op) != 0) {
      if (errno != EINTR) throw IoError(std::string("flock failed: ") + std::strerror(errno));
    }
  }
  ~FileLock() { ::flock(fd_, LOCK_UN); }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

bool pread_all(int fd, void* buf, std::size_t n, std::uint64_t offset) {
  auto* p = static_cast<char*>(buf);
  while (n > 0) {
    const ssize_t r = ::pread(fd, p, n, static_cast<off_t>(offset));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    p += r;
    n -= static_cast<std::size_t>(r);
    offset += static_cast<std::uint64_t>(r);
  }
  return true;
}

void write_all(int fd, const std::string& bytes) {
  const char* p = bytes.data();
  std::size_t n = bytes.size();
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) throw IoError(std::string("cache write failed: ") + std::strerror(errno));
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

std::uint64_t file_size(int fd) {
  struct stat st {};
  if (::fstat(fd, &st) != 0) throw IoError("fstat failed on cache file");
  return static_cast<std::uint64_t>(st.st_size);
}

template <typename T>
void append_pod(std::string& out, const T& value) {
  out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

std::string RecordKey::encode() const {
  std::string out(method_name(method));
  out += kSep;
  out += model_id;
  out += kSep;
  out += weights_fingerprint;
  out += kSep;
  out += text_hash;
  return out;
}

RecordKey RecordKey::decode(std::string_view bytes) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = bytes.find(kSep, start);
    parts.emplace_back(bytes.substr(start, sep - start));
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  if (parts.size() != 4) throw ParseError("malformed cache key");
  const auto method = parse_method(parts[0]);
  if (!method) throw ParseError("cache key has unknown method '" + parts[0] + "'");
  return {*method, parts[1], parts[2], parts[3]};
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path, int fd, Mode mode)
    : path_(std::move(path)), fd_(fd), mode_(mode) {}

EmbeddingCache EmbeddingCache::open(const std::filesystem::path& path, Mode mode) {
  int fd;
  if (mode == Mode::kReadWrite) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  } else {
    fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  }
  if (fd < 0) {
    throw IoError("cannot open cache " + path.string() + ": " + std::strerror(errno));
  }
  EmbeddingCache cache(path, fd, mode);
  cache.scan();
  return cache;
}

EmbeddingCache::EmbeddingCache(EmbeddingCache&& other) noexcept
    : path_(std::move(other.path_)),
      fd_(std::exchange(other.fd_, -1)),
      mode_(other.mode_),
      index_(std::move(other.index_)),
      valid_end_(other.valid_end_),
      scanned_size_(other.scanned_size_),
      stats_(other.stats_) {}

EmbeddingCache& EmbeddingCache::operator=(EmbeddingCache&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    mode_ = other.mode_;
    index_ = std::move(other.index_);
    valid_end_ = other.valid_end_;
    scanned_size_ = other.scanned_size_;
    stats_ = other.stats_;
  }
  return *this;
}

EmbeddingCache::~EmbeddingCache() {
  if (fd_ >= 0) ::close(fd_);
}

void EmbeddingCache::scan() {
  FileLock lock(fd_, LOCK_SH);
  const std::uint64_t size = file_size(fd_);
  scanned_size_ = size;
  std::uint64_t pos = 0;
  std::string key;
  std::vector<char> payload;
  while (pos < size) {
    std::uint32_t key_len = 0;
    if (!pread_all(fd_, &key_len, 4, pos) || key_len > kMaxKeyLen) break;
    key.resize(key_len);
    if (!pread_all(fd_, key.data(), key_len, pos + 4)) break;
    std::uint32_t dim = 0;
    if (!pread_all(fd_, &dim, 4, pos + 4 + key_len) || dim > kMaxDim) break;
    const std::uint64_t body = 4ull + key_len + 4ull + 4ull * dim;
    if (pos + body + 4 > size) break;
    payload.resize(body);
    std::uint32_t stored = 0;
    if (!pread_all(fd_, payload.data(), body, pos) || !pread_all(fd_, &stored, 4, pos + body)) {
      break;
    }
    const std::uint32_t actual = crc32(std::as_bytes(std::span(payload)));
    index_[key] = Entry{pos + 8 + key_len, dim, actual != stored};
    pos += body + 4;
  }
  valid_end_ = pos;
  if (valid_end_ < size) {
    std::cerr << "warning: ignoring " << (size - valid_end_)
              << " trailing bytes of incomplete records in " << path_.string() << '\n';
  }
}

std::optional<std::vector<float>> EmbeddingCache::read_entry(const std::string& key,
                                                             const Entry& e) {
  if (e.corrupt) return std::nullopt;
  const std::uint64_t start = e.offset - 8 - key.size();
  const std::uint64_t body = 8ull + key.size() + 4ull * e.dim;
  std::vector<char> payload(body);
  std::uint32_t stored = 0;
  if (!pread_all(fd_, payload.data(), body, start) || !pread_all(fd_, &stored, 4, start + body) ||
      crc32(std::as_bytes(std::span(payload))) != stored) {
    return std::nullopt;
  }
  std::vector<float> out(e.dim);
  std::memcpy(out.data(), payload.data() + 8 + key.size(), 4ull * e.dim);
  return out;
}

std::optional<std::vector<float>> EmbeddingCache::find(const RecordKey& key) {
  const std::string k = key.encode();
  auto it = index_.find(k);
  if (it == index_.end()) return std::nullopt;
  return read_entry(k, it->second);
}

bool EmbeddingCache::contains(const RecordKey& key) const {
  auto it = index_.find(key.encode());
  return it != index_.end() && !it->second.corrupt;
}

void EmbeddingCache::put(const RecordKey& key, std::span<const float> vector) {
  if (mode_ != Mode::kReadWrite) throw IoError("cache " + path_.string() + " is read-only");
  const std::string k = key.encode();
  if (k.size() > kMaxKeyLen) throw InvalidArgument("cache key too long");
  const auto dim = static_cast<std::uint32_t>(vector.size());
  std::string record;
  record.reserve(12 + k.size() + 4ull * dim);
  append_pod(record, static_cast<std::uint32_t>(k.size()));
  record += k;
  append_pod(record, dim);
  record.append(reinterpret_cast<const char*>(vector.data()), 4ull * dim);
  append_pod(record, crc32(std::as_bytes(std::span(record.data(), record.size()))));

  FileLock lock(fd_, LOCK_EX);
  std::uint64_t end = file_size(fd_);
  // Drop an incomplete tail seen at open time, unless another writer has
  // appended since.
  if (valid_end_ < scanned_size_ && end == scanned_size_) {
    if (::ftruncate(fd_, static_cast<off_t>(valid_end_)) != 0) {
      throw IoError("cannot truncate damaged cache tail");
    }
    end = valid_end_;
  }
  if (::lseek(fd_, static_cast<off_t>(end), SEEK_SET) < 0) throw IoError("lseek failed");
  write_all(fd_, record);
  valid_end_ = scanned_size_ = end + record.size();
  index_[k] = Entry{end + 8 + k.size(), dim, false};
}

EmbeddingRecord EmbeddingCache::get_or_compute(
    const RecordKey& key, const std::function<std::vector<float>()>& compute) {
  const std::string k = key.encode();
  auto it = index_.find(k);
  if (it != index_.end()) {
    if (auto v = read_entry(k, it->second)) {
      ++stats_.hits;
      return {std::move(*v), key};
    }
    ++stats_.corrupt;
    std::cerr << "warning: corrupt cache entry for " << method_name(key.method) << '/'
              << key.model_id << '/' << key.text_hash << " in " << path_.string()
              << "; recomputing\n";
  }
  ++stats_.misses;
  std::vector<float> v = compute();
  ++stats_.computed;
  put(key, v);
  return {std::move(v), key};
}

}  // namespace scl
