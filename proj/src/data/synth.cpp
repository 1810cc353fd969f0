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

#include "mrrn/synth.hpp"

#include <fmt/format.h>

#include <random>

#include "mrrn/error.hpp"
#include "mrrn/init.hpp"

namespace mrrn {

namespace {

constexpr std::uint64_t kStateTag = 0x5354415445ULL;
constexpr std::uint64_t kNoiseTag = 0x4e4f495345ULL;
constexpr std::uint64_t kProtoTag = 0x50524f544fULL;

bool IsPrime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t VideoTag(Split split, std::size_t label, std::size_t index) {
  return (static_cast<std::uint64_t>(split == Split::kTest) << 62) ^
         (static_cast<std::uint64_t>(label) << 40) ^ index;
}

// Rows are the per-state mean feature vectors at `level`.
Tensor StatePrototypes(const SynthConfig& config, Level level) {
  const std::size_t states = config.num_states(), dim = LevelDim(level);
  std::mt19937_64 rng(MixSeed(config.seed, kProtoTag));
  std::normal_distribution<double> normal;
  std::vector<double> z(states * config.latent);
  for (auto& v : z) v = normal(rng);
  // Independent projection per level, shared codes across levels.
  std::mt19937_64 prng(MixSeed(config.seed, kProtoTag + 1 + static_cast<int>(level)));
  std::vector<double> p(config.latent * dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.latent));
  for (auto& v : p) v = normal(prng) * scale;
  Tensor mu({states, dim});
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t d = 0; d < dim; ++d) {
      double acc = 0;
      for (std::size_t l = 0; l < config.latent; ++l) {
        acc += z[s * config.latent + l] * p[l * dim + d];
      }
      mu.at(s, d) = static_cast<float>(acc);
    }
  }
  return mu;
}

}  // namespace

std::string SynthClassName(std::size_t label) { return fmt::format("class_{:02d}", label); }

std::string SynthVideoId(Split split, std::size_t label, std::size_t index) {
  return fmt::format("{}_c{:02d}_{:05d}", split == Split::kTrain ? "train" : "test",
                     label, index);
}

void SynthConfig::Validate() const {
  if (num_classes < 2) throw ValidationError("synth: classes must be >= 2");
  if (train_per_class < 1 || test_per_class < 1) {
    throw ValidationError("synth: clips per class must be >= 1");
  }
  if (frames < 1) throw ValidationError("synth: frames must be >= 1");
  if (latent < 1) throw ValidationError("synth: latent must be >= 1");
  if (!(stay_prob >= 0 && stay_prob < 1)) {
    throw ValidationError("synth: stay probability must be in [0, 1)");
  }
  for (double n : noise) {
    if (!(n >= 0) || !std::isfinite(n)) {
      throw ValidationError("synth: noise must be finite and >= 0");
    }
  }
  if (levels.empty()) throw ValidationError("synth: no levels requested");
}

std::size_t SynthConfig::num_states() const {
  std::size_t n = std::max<std::size_t>(num_classes + 1, 5);
  while (!IsPrime(n)) ++n;
  return n;
}

SyntheticVideo SynthStates(const SynthConfig& config, Split split,
                           std::size_t label, std::size_t index) {
  if (label >= config.num_classes) {
    throw ValidationError("synth: label " + std::to_string(label) +
                          " outside [0, " + std::to_string(config.num_classes) + ")");
  }
  const std::size_t states = config.num_states(), step = label + 1;
  std::mt19937_64 rng(MixSeed(config.seed ^ kStateTag, VideoTag(split, label, index)));
  std::uniform_real_distribution<double> unit;
  SyntheticVideo v{label, {}};
  v.states.resize(config.frames);
  std::size_t s = std::uniform_int_distribution<std::size_t>(0, states - 1)(rng);
  for (std::size_t t = 0; t < config.frames; ++t) {
    v.states[t] = s;
    if (unit(rng) >= config.stay_prob) s = (s + step) % states;
  }
  return v;
}

FeatureSequence SynthFeatures(const SynthConfig& config,
                              const SyntheticVideo& video, Level level,
                              std::uint64_t noise_seed) {
  const Tensor mu = StatePrototypes(config, level);
  const std::size_t dim = LevelDim(level);
  const double sigma = config.noise[static_cast<std::size_t>(level)];
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> normal;
  FeatureSequence seq{level, Tensor({video.states.size(), dim})};
  for (std::size_t t = 0; t < video.states.size(); ++t) {
    for (std::size_t d = 0; d < dim; ++d) {
      seq.frames.at(t, d) = static_cast<float>(mu.at(video.states[t], d) + sigma * normal(rng));
    }
  }
  return seq;
}

namespace {

std::uint64_t NoiseSeed(const SynthConfig& config, Split split, std::size_t label,
                        std::size_t index, Level level) {
  return MixSeed(config.seed ^ kNoiseTag,
                 VideoTag(split, label, index) ^
                     (static_cast<std::uint64_t>(level) << 56));
}

std::size_t PerClass(const SynthConfig& config, Split split) {
  return split == Split::kTrain ? config.train_per_class : config.test_per_class;
}

}  // namespace

InMemorySplit SynthSplit(const SynthConfig& config, Split split, Level level) {
  config.Validate();
  InMemorySplit out;
  for (std::size_t k = 0; k < config.num_classes; ++k) out.classes.push_back(SynthClassName(k));
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    for (std::size_t i = 0; i < PerClass(config, split); ++i) {
      out.video_ids.push_back(SynthVideoId(split, k, i));
      const SyntheticVideo v = SynthStates(config, split, k, i);
      out.sequences.push_back(
          SynthFeatures(config, v, level, NoiseSeed(config, split, k, i, level)).frames);
      out.labels.push_back(k);
    }
  }
  return out;
}

SynthOutput WriteSynthDataset(const SynthConfig& config,
                              const std::filesystem::path& out_dir) {
  config.Validate();
  std::vector<std::string> classes;
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    classes.push_back(SynthClassName(k));
  }
  SynthOutput out;
  for (Split split : {Split::kTrain, Split::kTest}) {
    const std::string split_name = split == Split::kTrain ? "train" : "test";
    DatasetManifest m;
    m.root = out_dir;
    m.classes = classes;
    for (std::size_t k = 0; k < config.num_classes; ++k) {
      for (std::size_t i = 0; i < PerClass(config, split); ++i) {
        const SyntheticVideo v = SynthStates(config, split, k, i);
        ManifestEntry e;
        e.video_id = SynthVideoId(split, k, i);
        e.label = k;
        e.num_frames = config.frames;
        for (Level level : config.levels) {
          const std::string rel = fmt::format("features/{}/{}.{}.mrrn", split_name,
                                              e.video_id, LevelName(level));
          WriteFeatures(out_dir / rel,
                        SynthFeatures(config, v, level,
                                      NoiseSeed(config, split, k, i, level)));
          e.paths[level] = rel;
        }
        m.entries.push_back(std::move(e));
      }
    }
    const auto path = out_dir / (split_name + ".jsonl");
    SaveManifest(path, m);
    if (split == Split::kTrain) {
      out.train = std::move(m);
      out.train_manifest = path;
    } else {
      out.test = std::move(m);
      out.test_manifest = path;
    }
  }
  return out;
}

}  // namespace mrrn
