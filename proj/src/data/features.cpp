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

#include "mrrn/features.hpp"

#include <cstring>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"

namespace mrrn {

namespace {

constexpr char kMagic[4] = {'M', 'R', 'R', 'N'};

}  // namespace

std::string_view LevelName(Level level) {
  switch (level) {
    case Level::kLow: return "low";
    case Level::kMid: return "mid";
    case Level::kHigh: return "high";
  }
  throw ValidationError("unknown level");
}

Level ParseLevel(std::string_view name) {
  if (name == "low") return Level::kLow;
  if (name == "mid") return Level::kMid;
  if (name == "high") return Level::kHigh;
  throw ValidationError("unknown level '" + std::string(name) +
                        "' (expected low, mid or high)");
}

std::size_t LevelDim(Level level) {
  switch (level) {
    case Level::kLow: return 128;
    case Level::kMid: return 256;
    case Level::kHigh: return 512;
  }
  throw ValidationError("unknown level");
}

void FeatureSequence::Validate() const {
  if (frames.rank() != 2) {
    throw ShapeError("feature sequence must be [T, dim], got " +
                     ShapeToString(frames.shape()));
  }
  if (dim() != LevelDim(level)) {
    throw ShapeError("feature width " + std::to_string(dim()) + " does not match " +
                     std::string(LevelName(level)) + " level width " +
                     std::to_string(LevelDim(level)));
  }
  if (!frames.AllFinite()) throw NumericError("feature sequence has non-finite values");
}

std::vector<std::uint8_t> EncodeFeatures(const FeatureSequence& seq) {
  seq.Validate();
  ByteWriter w;
  for (char c : kMagic) w.U8(static_cast<std::uint8_t>(c));
  w.U16(kFeatureFileVersion);
  w.U8(static_cast<std::uint8_t>(seq.level));
  w.U8(0);
  w.U32(static_cast<std::uint32_t>(seq.num_frames()));
  w.U32(static_cast<std::uint32_t>(seq.dim()));
  for (float v : seq.frames.data()) w.F32(v);
  return w.Take();
}

FeatureSequence DecodeFeatures(std::span<const std::uint8_t> bytes,
                               const std::string& source) {
  ByteReader r(bytes, source);
  if (bytes.size() < kFeatureHeaderBytes) {
    r.FailAt(bytes.size(), "truncated header: expected " +
                               std::to_string(kFeatureHeaderBytes) +
                               " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) r.FailAt(0, "bad magic");
  for (int i = 0; i < 4; ++i) r.U8();
  const std::uint16_t version = r.U16();
  if (version != kFeatureFileVersion) {
    r.FailAt(4, "unsupported version " + std::to_string(version));
  }
  const std::uint8_t level_byte = r.U8();
  if (level_byte > 2) r.FailAt(6, "bad level " + std::to_string(level_byte));
  const std::uint8_t reserved = r.U8();
  if (reserved != 0) r.FailAt(7, "reserved byte must be 0");
  const std::uint32_t frames = r.U32();
  if (frames == 0) r.FailAt(8, "zero frames");
  const std::uint32_t dim = r.U32();
  const Level level = static_cast<Level>(level_byte);
  if (dim != LevelDim(level)) {
    r.FailAt(12, "dim " + std::to_string(dim) + " does not match " +
                     std::string(LevelName(level)) + " level width " +
                     std::to_string(LevelDim(level)));
  }
  const std::size_t expected =
      kFeatureHeaderBytes + std::size_t{4} * frames * dim;
  if (bytes.size() != expected) {
    r.FailAt(std::min(bytes.size(), expected),
             (bytes.size() < expected ? "truncated: expected " : "trailing data: expected ") +
                 std::to_string(expected) + " bytes, actual " +
                 std::to_string(bytes.size()));
  }
  FeatureSequence seq;
  seq.level = level;
  seq.frames = Tensor({frames, dim});
  r.F32Array(seq.frames.data());
  if (!seq.frames.AllFinite()) r.FailAt(kFeatureHeaderBytes, "non-finite feature value");
  return seq;
}

void WriteFeatures(const std::filesystem::path& path, const FeatureSequence& seq) {
  WriteFileAtomic(path, EncodeFeatures(seq));
}

FeatureSequence ReadFeatures(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return DecodeFeatures(bytes, path.string());
}

}  // namespace mrrn
