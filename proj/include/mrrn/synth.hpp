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

// Synthetic stand-in for backbone features. Every video walks a cycle over a
// small set of shared latent states; the class decides the cycle's step size,
// so all classes visit the same states equally often and only the order of
// visits tells them apart. States are mapped to each level's width through a
// fixed random projection and corrupted with Gaussian noise.

#ifndef MRRN_SYNTH_HPP_
#define MRRN_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrrn/features.hpp"
#include "mrrn/manifest.hpp"

namespace mrrn {

struct SynthConfig {
  std::size_t num_classes = 5;
  std::size_t train_per_class = 400;
  std::size_t test_per_class = 100;
  std::size_t frames = 30;              // frames per video
  std::size_t latent = 16;
  double stay_prob = 0.0;               // chance of repeating a state
  std::array<double, 3> noise = {1.5, 1.25, 1.0};  // low, mid, high
  std::vector<Level> levels = {kAllLevels.begin(), kAllLevels.end()};
  std::uint64_t seed = 7;

  void Validate() const;
  // Smallest prime > num_classes and >= 5; step k+1 then cycles through
  // every state for each class k.
  std::size_t num_states() const;
};

enum class Split { kTrain, kTest };

// "class_00", "class_01", ...
std::string SynthClassName(std::size_t label);
// "train_c00_00000" style ids, also the feature file stems.
std::string SynthVideoId(Split split, std::size_t label, std::size_t index);

struct SyntheticVideo {
  std::size_t label;
  std::vector<std::size_t> states;  // one per frame
};

// State walk of video `index` of `split`; deterministic in (config, split,
// label, index).
SyntheticVideo SynthStates(const SynthConfig& config, Split split,
                           std::size_t label, std::size_t index);

// Per-level frame features for a state walk.
FeatureSequence SynthFeatures(const SynthConfig& config,
                              const SyntheticVideo& video, Level level,
                              std::uint64_t noise_seed);

struct InMemorySplit {
  std::vector<std::string> classes;
  std::vector<std::string> video_ids;
  std::vector<Tensor> sequences;  // [T, dim]
  std::vector<std::size_t> labels;
};

// Generates a split without touching disk (identical values to the files).
InMemorySplit SynthSplit(const SynthConfig& config, Split split, Level level);

struct SynthOutput {
  DatasetManifest train;
  DatasetManifest test;
  std::filesystem::path train_manifest;
  std::filesystem::path test_manifest;
};

// Writes train.jsonl, test.jsonl, classes.txt and features/ under `out_dir`.
SynthOutput WriteSynthDataset(const SynthConfig& config,
                              const std::filesystem::path& out_dir);

}  // namespace mrrn

#endif  // MRRN_SYNTH_HPP_
