// src/harness/binio.hpp
//
// Copyright 2026 lhuclab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Little-endian binary encoding helpers shared by the checkpoint and dataset
// file formats.  Both formats are byte stream + trailing FNV-1a-64 checksum;
// the writer accumulates the checksum as it goes and the reader verifies it
// before any field is interpreted into a result object.

#ifndef LHUC_HARNESS_BINIO_HPP_
#define LHUC_HARNESS_BINIO_HPP_

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace lhuc::binio {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

// Append-only little-endian byte buffer.
class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void raw(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  void f64s(const double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) f64(data[i]);
  }
  void i32s(const int* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) i32(data[i]);
  }

  // Appends the checksum of everything written so far.
  void seal() { u64(fnv1a64(bytes_.data(), bytes_.size())); }

  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

// Sequential reader over a fully loaded byte buffer.  `what` names the format
// in error messages ("checkpoint", "dataset").
class Reader {
 public:
  Reader(std::vector<char> bytes, std::string what)
      : bytes_(std::move(bytes)), what_(std::move(what)) {}

  // Verifies the trailing checksum and hides it from subsequent reads.
  void check_seal() {
    if (bytes_.size() < 8) {
      throw Error(ErrorCode::format, "truncated " + what_ + " file");
    }
    const std::size_t body = bytes_.size() - 8;
    std::uint64_t stored = 0;
    for (int i = 7; i >= 0; --i) {
      stored = (stored << 8) |
               static_cast<unsigned char>(bytes_[body + static_cast<std::size_t>(i)]);
    }
    if (fnv1a64(bytes_.data(), body) != stored) {
      throw Error(ErrorCode::format, what_ + " checksum mismatch");
    }
    end_ = body;
  }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  void f64s(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f64();
  }
  void i32s(int* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = i32();
  }
  void raw(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }

  // All payload bytes must be consumed exactly.
  void expect_end() const {
    if (pos_ != end_) {
      throw Error(ErrorCode::format, what_ + " has trailing bytes");
    }
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > end_) {
      throw Error(ErrorCode::format, "truncated " + what_ + " file");
    }
  }

  std::vector<char> bytes_;
  std::string what_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

// Whole-file helpers; both throw ErrorCode::io with the path on failure.
void write_file(const std::string& path, const std::vector<char>& bytes);
std::vector<char> read_file(const std::string& path);

// First bytes of the file, for format sniffing; empty on unreadable paths.
std::string read_magic(const std::string& path, std::size_t n = 8);

}  // namespace lhuc::binio

#endif  // LHUC_HARNESS_BINIO_HPP_
