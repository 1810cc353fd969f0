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

#include "mrrn/preprocess.hpp"

#include <random>

namespace mrrn {

namespace {

void RequireChw(const char* op, const Tensor& t) {
  if (t.rank() != 3) {
    throw ShapeError(std::string(op) + ": expected [C, H, W], got " +
                     ShapeToString(t.shape()));
  }
}

}  // namespace

Tensor SpatialAverage(const Tensor& activation) {
  RequireChw("spatial_average", activation);
  const std::size_t channels = activation.dim(0);
  const std::size_t plane = activation.dim(1) * activation.dim(2);
  Tensor out({channels});
  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0;
    for (std::size_t i = 0; i < plane; ++i) sum += activation[c * plane + i];
    out[c] = static_cast<float>(sum / static_cast<double>(plane));
  }
  return out;
}

Tensor NormalizeFrame(const Tensor& frame, std::span<const float> mean,
                      std::span<const float> stddev) {
  RequireChw("normalize_frame", frame);
  const std::size_t channels = frame.dim(0);
  if (mean.size() != channels || stddev.size() != channels) {
    throw ShapeError("normalize_frame: " + std::to_string(channels) +
                     " channels but " + std::to_string(mean.size()) +
                     " means and " + std::to_string(stddev.size()) + " stds");
  }
  for (std::size_t c = 0; c < channels; ++c) {
    if (!(stddev[c] > 0)) {
      throw ValidationError("normalize_frame: std of channel " +
                            std::to_string(c) + " must be > 0");
    }
  }
  const std::size_t plane = frame.dim(1) * frame.dim(2);
  Tensor out(frame.shape());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      const float v = frame[c * plane + i];
      if (!(v >= 0.f && v <= 1.f)) {
        throw ValidationError("normalize_frame: value " + std::to_string(v) +
                              " at channel " + std::to_string(c) +
                              " outside [0, 1]");
      }
      out[c * plane + i] = (v - mean[c]) / stddev[c];
    }
  }
  return out;
}

Tensor HorizontalFlip(const Tensor& frame) {
  RequireChw("horizontal_flip", frame);
  const std::size_t rows = frame.dim(0) * frame.dim(1), width = frame.dim(2);
  Tensor out(frame.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t x = 0; x < width; ++x) {
      out[r * width + x] = frame[r * width + (width - 1 - x)];
    }
  }
  return out;
}

CropResult CropFlip(const Tensor& frame, CropMode mode, std::uint64_t seed,
                    const CropOptions& options) {
  RequireChw("crop_flip", frame);
  const std::size_t channels = frame.dim(0), height = frame.dim(1),
                    width = frame.dim(2), size = options.size;
  if (size == 0 || height < size || width < size) {
    throw ValidationError("crop_flip: frame " + ShapeToString(frame.shape()) +
                          " smaller than crop " + std::to_string(size));
  }
  std::size_t top = (height - size) / 2;
  std::size_t left = (width - size) / 2;
  bool flip = false;
  if (mode == CropMode::kTrain) {
    std::mt19937_64 rng(seed);
    top = std::uniform_int_distribution<std::size_t>(0, height - size)(rng);
    left = std::uniform_int_distribution<std::size_t>(0, width - size)(rng);
    flip = std::bernoulli_distribution(0.5)(rng);
    if (options.force_flip) flip = *options.force_flip;
  }
  Tensor out({channels, size, size});
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < size; ++y) {
      const float* src = &frame[(c * height + top + y) * width + left];
      float* dst = &out[(c * size + y) * size];
      for (std::size_t x = 0; x < size; ++x) dst[x] = src[x];
    }
  }
  if (flip) out = HorizontalFlip(out);
  return {std::move(out), top, left, flip};
}

}  // namespace mrrn
