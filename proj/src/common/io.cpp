/* Copyright 2026 The MRRN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mrrn/io.hpp"

#include <malloc.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mrrn/error.hpp"

namespace mrrn {

namespace fs = std::filesystem;

void WriteFileAtomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

void WriteFileAtomic(const fs::path& path, std::string_view text) {
  WriteFileAtomic(path, std::span(reinterpret_cast<const std::uint8_t*>(
                                      text.data()),
                                  text.size()));
}

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

std::string ReadFileText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void RetainFreedMemory() {
#ifdef __GLIBC__
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, -1);
    return true;
  }();
  (void)done;
#endif
}

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

template <typename U>
void Put(std::vector<std::uint8_t>& bytes, U v) {
  std::uint8_t buf[sizeof(U)];
  std::memcpy(buf, &v, sizeof(U));
  bytes.insert(bytes.end(), buf, buf + sizeof(U));
}

}  // namespace

void ByteWriter::U16(std::uint16_t v) { Put(bytes_, v); }
void ByteWriter::U32(std::uint32_t v) { Put(bytes_, v); }
void ByteWriter::U64(std::uint64_t v) { Put(bytes_, v); }
void ByteWriter::F32(float v) { Put(bytes_, v); }
void ByteWriter::F64(double v) { Put(bytes_, v); }

void ByteWriter::Raw(std::span<const std::uint8_t> data) {
  bytes_.insert(bytes_.end(), data.begin(), data.end());
}

void ByteWriter::Str(std::string_view s) {
  U32(static_cast<std::uint32_t>(s.size()));
  bytes_.insert(bytes_.end(), s.begin(), s.end());
}

void ByteReader::Fail(const std::string& what) const { FailAt(offset_, what); }

void ByteReader::FailAt(std::size_t offset, const std::string& what) const {
  throw FormatError(source_, offset, what);
}

void ByteReader::Need(std::size_t n) {
  if (remaining() < n) {
    Fail("truncated: expected " + std::to_string(n) + " more bytes, " +
         std::to_string(remaining()) + " available (file length " +
         std::to_string(bytes_.size()) + ")");
  }
}

namespace {

template <typename U>
U Get(std::span<const std::uint8_t> bytes, std::size_t offset) {
  U v;
  std::memcpy(&v, bytes.data() + offset, sizeof(U));
  return v;
}

}  // namespace

std::uint8_t ByteReader::U8() {
  Need(1);
  return bytes_[offset_++];
}

#define MRRN_READ(NAME, TYPE)          \
  TYPE ByteReader::NAME() {            \
    Need(sizeof(TYPE));                \
    TYPE v = Get<TYPE>(bytes_, offset_); \
    offset_ += sizeof(TYPE);           \
    return v;                          \
  }

MRRN_READ(U16, std::uint16_t)
MRRN_READ(U32, std::uint32_t)
MRRN_READ(U64, std::uint64_t)
MRRN_READ(F32, float)
MRRN_READ(F64, double)

#undef MRRN_READ

std::string ByteReader::Str() {
  const std::uint32_t n = U32();
  Need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + offset_), n);
  offset_ += n;
  return s;
}

void ByteReader::F32Array(std::span<float> out) {
  Need(out.size() * sizeof(float));
  std::memcpy(out.data(), bytes_.data() + offset_, out.size() * sizeof(float));
  offset_ += out.size() * sizeof(float);
}

}  // namespace mrrn
