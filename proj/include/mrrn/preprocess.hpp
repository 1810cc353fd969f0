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

// Frame-tensor preprocessing on already decoded C x H x W tensors.

#ifndef MRRN_PREPROCESS_HPP_
#define MRRN_PREPROCESS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "mrrn/tensor.hpp"

namespace mrrn {

// ImageNet channel statistics.
inline constexpr std::array<float, 3> kImageNetMean = {0.485f, 0.456f, 0.406f};
inline constexpr std::array<float, 3> kImageNetStd = {0.229f, 0.224f, 0.225f};

// Mean over the H x W plane of every channel: [C, H, W] -> [C].
Tensor SpatialAverage(const Tensor& activation);

// (x - mean[c]) / std[c] per channel. Inputs must lie in [0, 1].
Tensor NormalizeFrame(const Tensor& frame, std::span<const float> mean,
                      std::span<const float> stddev);

enum class CropMode { kTrain, kTest };

struct CropOptions {
  std::size_t size = 224;
  // Overrides the coin flip in train mode (tests use it to force a flip).
  std::optional<bool> force_flip;
};

struct CropResult {
  Tensor frame;  // [C, size, size]
  std::size_t top;
  std::size_t left;
  bool flipped;
};

// Train: uniformly random size x size window, mirrored with probability 0.5,
// reproducible per seed. Test: centered window, never mirrored.
CropResult CropFlip(const Tensor& frame, CropMode mode, std::uint64_t seed,
                    const CropOptions& options = {});

// Mirrors every channel left-right.
Tensor HorizontalFlip(const Tensor& frame);

}  // namespace mrrn

#endif  // MRRN_PREPROCESS_HPP_
