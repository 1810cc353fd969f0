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

// Versioned binary snapshot of a training run. The byte layout is described
// in docs/checkpoint.md.

#ifndef MRRN_CHECKPOINT_HPP_
#define MRRN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mrrn/trainer.hpp"

namespace mrrn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> EncodeCheckpoint(const TrainState& state);
TrainState DecodeCheckpoint(std::span<const std::uint8_t> bytes,
                            const std::string& source);

void SaveCheckpoint(const std::filesystem::path& path, const TrainState& state);
TrainState LoadCheckpoint(const std::filesystem::path& path);

}  // namespace mrrn

#endif  // MRRN_CHECKPOINT_HPP_
