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

// Per-frame feature sequences and their on-disk form.
//
// Feature file, little-endian:
//
//   offset  size  field
//   0       4     magic "MRRN"
//   4       2     version (u16) = 1
//   6       1     level (u8): 0 low, 1 mid, 2 high
//   7       1     reserved (u8) = 0
//   8       4     T (u32), number of frames
//   12      4     dim (u32), must equal the level's width
//   16      4*T*dim  IEEE-754 binary32 values, row-major [T, dim]

#ifndef MRRN_FEATURES_HPP_
#define MRRN_FEATURES_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrrn/tensor.hpp"

namespace mrrn {

enum class Level : std::uint8_t { kLow = 0, kMid = 1, kHigh = 2 };

inline constexpr std::array<Level, 3> kAllLevels = {Level::kLow, Level::kMid,
                                                    Level::kHigh};

std::string_view LevelName(Level level);
Level ParseLevel(std::string_view name);
// 128 / 256 / 512: channel count of the backbone stage the level comes from.
std::size_t LevelDim(Level level);

struct FeatureSequence {
  Level level = Level::kHigh;
  Tensor frames;  // [T, LevelDim(level)]

  std::size_t num_frames() const { return frames.dim(0); }
  std::size_t dim() const { return frames.dim(1); }

  void Validate() const;
};

inline constexpr std::uint16_t kFeatureFileVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 16;

std::vector<std::uint8_t> EncodeFeatures(const FeatureSequence& seq);
// `source` names the buffer in error messages.
FeatureSequence DecodeFeatures(std::span<const std::uint8_t> bytes,
                               const std::string& source);

void WriteFeatures(const std::filesystem::path& path, const FeatureSequence& seq);
FeatureSequence ReadFeatures(const std::filesystem::path& path);

}  // namespace mrrn

#endif  // MRRN_FEATURES_HPP_
