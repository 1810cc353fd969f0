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

// Training recipe, optimizer, model assembly and evaluation.

#ifndef MRRN_TRAINER_HPP_
#define MRRN_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mrrn/clips.hpp"
#include "mrrn/features.hpp"
#include "mrrn/head.hpp"
#include "mrrn/manifest.hpp"
#include "mrrn/sru.hpp"
#include "mrrn/synth.hpp"

namespace mrrn {

struct TrainConfig {
  Level level = Level::kHigh;
  std::size_t layers = 3;
  std::size_t hidden = 1024;
  Pooling pool = Pooling::kMean;
  std::size_t epochs = 12;
  std::size_t batch = 28;
  double lr1 = 1e-5;
  double lr2 = 1e-6;
  std::size_t lr_drop_epoch = 8;  // last epoch trained at lr1
  double dropout = 0.5;
  std::uint64_t seed = 7;
  FusionWeights fusion;
  ClipProtocol clips;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void Validate() const;
  // One "key=value" line per field in a fixed order; doubles use the
  // shortest representation that round-trips.
  std::string Serialize() const;
  static TrainConfig Deserialize(const std::string& text);
};

double LrSchedule(const TrainConfig& config, std::size_t epoch);

struct AdamState {
  std::vector<std::string> names;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState For(const std::vector<std::string>& names,
                       const std::vector<const Tensor*>& shapes, double beta1,
                       double beta2, double epsilon);
};

// Bias-corrected Adam. params[i] is named state.names[i]; throws
// NumericError naming the parameter if its gradient is not finite, before
// anything is modified.
void AdamStep(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
              AdamState& state, double lr);

struct Model {
  StackConfig stack;
  std::vector<SruLayerParams<float>> layers;
  ClassifierParams<float> head;
  Pooling pool = Pooling::kMean;

  static Model Init(const TrainConfig& config, std::size_t input_dim,
                    std::size_t num_classes, std::uint64_t seed);
  std::size_t num_classes() const { return head.num_classes(); }

  // Stable order: layer0.W, layer0.W_f, ..., cls.W, cls.b.
  std::vector<std::pair<std::string, Tensor*>> NamedParams();
  std::vector<std::pair<std::string, const Tensor*>> NamedParams() const;
};

// Pooled logits [B, classes] for a time-major batch x [T, B, input]. In train
// mode dropout is drawn from `seed`; otherwise it is off.
Var<float> ModelLogits(Graph<float>& graph, const Model& model, const Tensor& x,
                       bool train_mode, std::uint64_t seed, bool trainable);

// One level's features for every video of a manifest, held in memory.
struct LoadedSplit {
  Level level = Level::kHigh;
  std::vector<std::string> classes;
  std::vector<std::string> video_ids;
  std::vector<Tensor> sequences;  // [num_frames, dim]
  std::vector<std::size_t> labels;

  std::size_t size() const { return sequences.size(); }
  std::size_t dim() const { return LevelDim(level); }
};

// Checks every feature file exists (listing all absent ones) and that each
// file's level, width and frame count agree with the manifest.
LoadedSplit LoadSplit(const DatasetManifest& manifest, Level level);

// Same content as LoadSplit on WriteSynthDataset's output, without the files.
LoadedSplit SynthLoadedSplit(const SynthConfig& config, Split split, Level level);

struct ClipSample {
  std::size_t video;
  std::vector<std::size_t> frames;
};

std::vector<ClipSample> ExpandClips(const LoadedSplit& split,
                                    const ClipProtocol& protocol);

// Time-major batch [clip_len, B, dim] gathered from `samples[begin, end)`.
Tensor GatherBatch(const LoadedSplit& split, std::span<const ClipSample> samples,
                   std::span<const std::size_t> order, std::size_t begin,
                   std::size_t end);

struct HistoryRow {
  std::size_t epoch;
  std::string split;
  double loss;
  double accuracy;
  double lr;
};

inline constexpr const char* kHistoryHeader = "epoch,split,loss,accuracy,lr";
std::string HistoryCsv(const std::vector<HistoryRow>& rows);

struct TrainState {
  TrainConfig config;
  Model model;
  AdamState adam;
  std::size_t epoch = 0;  // completed epochs
  std::mt19937_64 rng;
  std::vector<HistoryRow> history;
};

struct TrainHooks {
  // Called after every epoch with the state as it would be checkpointed.
  std::function<void(const TrainState&)> on_epoch;
};

// Fresh state: parameters drawn from the config seed.
TrainState InitTrainState(const TrainConfig& config, std::size_t input_dim,
                          std::size_t num_classes);

// Runs epochs state.epoch + 1 .. config.epochs. `test` may be null; when set,
// a "test" history row follows each "train" row.
void Train(TrainState& state, const LoadedSplit& train, const LoadedSplit* test,
           const TrainHooks& hooks = {});

struct VideoPrediction {
  std::string video_id;
  std::size_t label;
  PredictionVector prediction;
};

struct EvalResult {
  std::string level;  // level name or "fused"
  std::vector<std::string> classes;
  std::vector<VideoPrediction> videos;
  double accuracy = 0;
  double loss = 0;                      // mean video-level cross-entropy
  std::vector<double> per_class_accuracy;
  std::vector<std::size_t> per_class_videos;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

// Scores already aggregated video predictions.
EvalResult Score(std::string level, std::vector<std::string> classes,
                 std::vector<VideoPrediction> videos);

// Clip distributions averaged per video, then scored.
EvalResult Evaluate(const Model& model, const LoadedSplit& split,
                    const ClipProtocol& protocol, std::size_t batch = 64);

// Per-video fusion of three evaluations of the same videos.
EvalResult FuseEvaluations(const EvalResult& high, const EvalResult& mid,
                           const EvalResult& low, const FusionWeights& weights);

}  // namespace mrrn

#endif  // MRRN_TRAINER_HPP_
