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

#include <fmt/format.h>

#include <algorithm>

#include "mrrn/error.hpp"
#include "mrrn/init.hpp"
#include "mrrn/io.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn {

namespace {

constexpr std::uint64_t kInitTag = 0x1417;
constexpr std::uint64_t kRngTag = 0x5eed;

}  // namespace

LoadedSplit LoadSplit(const DatasetManifest& manifest, Level level) {
  manifest.Validate();
  RequireFeatureFiles(manifest, level);
  LoadedSplit s;
  s.level = level;
  s.classes = manifest.classes;
  for (const auto& e : manifest.entries) {
    const auto path = manifest.FeaturePath(e, level);
    FeatureSequence seq = ReadFeatures(path);
    if (seq.level != level) {
      throw ValidationError(path.string() + ": holds " + std::string(LevelName(seq.level)) +
                            " features, expected " + std::string(LevelName(level)));
    }
    if (seq.num_frames() != e.num_frames) {
      throw ValidationError(path.string() + ": " + std::to_string(seq.num_frames()) +
                            " frames but the manifest says " +
                            std::to_string(e.num_frames));
    }
    s.video_ids.push_back(e.video_id);
    s.sequences.push_back(std::move(seq.frames));
    s.labels.push_back(e.label);
  }
  if (s.sequences.empty()) throw ValidationError("manifest has no videos");
  return s;
}

LoadedSplit SynthLoadedSplit(const SynthConfig& config, Split split, Level level) {
  InMemorySplit m = SynthSplit(config, split, level);
  LoadedSplit s;
  s.level = level;
  s.classes = std::move(m.classes);
  s.video_ids = std::move(m.video_ids);
  s.sequences = std::move(m.sequences);
  s.labels = std::move(m.labels);
  return s;
}

std::vector<ClipSample> ExpandClips(const LoadedSplit& split,
                                    const ClipProtocol& protocol) {
  std::vector<ClipSample> out;
  for (std::size_t v = 0; v < split.size(); ++v) {
    for (auto& clip : SplitClips(split.sequences[v].dim(0), protocol, split.video_ids[v])) {
      out.push_back({v, std::move(clip.frames)});
    }
  }
  return out;
}

Tensor GatherBatch(const LoadedSplit& split, std::span<const ClipSample> samples,
                   std::span<const std::size_t> order, std::size_t begin,
                   std::size_t end) {
  const std::size_t batch = end - begin, dim = split.dim();
  const std::size_t steps = samples[order[begin]].frames.size();
  Tensor x({steps, batch, dim});
  for (std::size_t b = 0; b < batch; ++b) {
    const ClipSample& s = samples[order[begin + b]];
    const Tensor& seq = split.sequences[s.video];
    for (std::size_t t = 0; t < steps; ++t) {
      std::copy_n(&seq[s.frames[t] * dim], dim, &x[(t * batch + b) * dim]);
    }
  }
  return x;
}

std::string HistoryCsv(const std::vector<HistoryRow>& rows) {
  std::string out = std::string(kHistoryHeader) + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.epoch, r.split, r.loss, r.accuracy, r.lr);
  }
  return out;
}

TrainState InitTrainState(const TrainConfig& config, std::size_t input_dim,
                          std::size_t num_classes) {
  config.Validate();
  TrainState s;
  s.config = config;
  s.model = Model::Init(config, input_dim, num_classes, MixSeed(config.seed, kInitTag));
  std::vector<std::string> names;
  std::vector<const Tensor*> tensors;
  for (auto& [name, t] : std::as_const(s.model).NamedParams()) {
    names.push_back(name);
    tensors.push_back(t);
  }
  s.adam = AdamState::For(names, tensors, config.beta1, config.beta2, config.epsilon);
  s.rng.seed(MixSeed(config.seed, kRngTag));
  return s;
}

void Train(TrainState& state, const LoadedSplit& train, const LoadedSplit* test,
           const TrainHooks& hooks) {
  const TrainConfig& cfg = state.config;
  cfg.Validate();
  RetainFreedMemory();
  // Everything that can be checked is checked before the first step.
  if (train.size() == 0) throw ValidationError("training split is empty");
  for (const LoadedSplit* s : {&train, test}) {
    if (!s) continue;
    if (s->dim() != state.model.stack.input) {
      throw ShapeError(fmt::format("{} features are {} wide, model expects {}",
                                   LevelName(s->level), s->dim(),
                                   state.model.stack.input));
    }
    if (s->classes.size() != state.model.num_classes()) {
      throw ValidationError(fmt::format("split has {} classes, model has {}",
                                        s->classes.size(), state.model.num_classes()));
    }
    for (const Tensor& seq : s->sequences) {
      if (seq.rank() != 2 || seq.dim(1) != s->dim()) {
        throw ShapeError("feature sequence " + ShapeToString(seq.shape()) +
                         " does not match level width " + std::to_string(s->dim()));
      }
    }
  }
  const std::vector<ClipSample> samples = ExpandClips(train, cfg.clips);
  std::vector<std::size_t> order(samples.size());
  std::vector<std::size_t> labels;

  auto named = state.model.NamedParams();
  std::vector<Tensor*> params;
  for (auto& [name, t] : named) params.push_back(t);

  while (state.epoch < cfg.epochs) {
    const std::size_t epoch = state.epoch + 1;
    const double lr = LrSchedule(cfg, epoch);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), state.rng);
    double loss_sum = 0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch);
      const Tensor x = GatherBatch(train, samples, order, begin, end);
      labels.clear();
      for (std::size_t i = begin; i < end; ++i) {
        labels.push_back(train.labels[samples[order[i]].video]);
      }
      const std::uint64_t dropout_seed = state.rng();
      Graph<float> graph;
      Var<float> logits = ModelLogits(graph, state.model, x, true, dropout_seed, true);
      Var<float> loss = SoftmaxCrossEntropy(logits, labels);
      const Tensor& lv = logits.value();
      const std::size_t classes = lv.dim(1);
      for (std::size_t b = 0; b < labels.size(); ++b) {
        const float* row = &lv[b * classes];
        const std::size_t pred = std::max_element(row, row + classes) - row;
        correct += pred == labels[b];
      }
      loss_sum += static_cast<double>(loss.value().item()) * labels.size();
      const Gradients<float> grads = graph.Backward(loss);
      std::vector<const Tensor*> g;
      for (auto& [name, t] : named) g.push_back(&grads[name]);
      AdamStep(params, g, state.adam, lr);
    }
    state.epoch = epoch;
    const double n = static_cast<double>(samples.size());
    state.history.push_back({epoch, "train", loss_sum / n, correct / n, lr});
    if (test) {
      const EvalResult r = Evaluate(state.model, *test, cfg.clips);
      state.history.push_back({epoch, "test", r.loss, r.accuracy, lr});
    }
    if (hooks.on_epoch) hooks.on_epoch(state);
  }
}

}  // namespace mrrn
