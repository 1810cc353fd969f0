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

#include <cmath>
#include <numeric>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn {

EvalResult Score(std::string level, std::vector<std::string> classes,
                 std::vector<VideoPrediction> videos) {
  const std::size_t c = classes.size();
  EvalResult r;
  r.level = std::move(level);
  r.classes = std::move(classes);
  r.confusion.assign(c, std::vector<std::size_t>(c, 0));
  r.per_class_videos.assign(c, 0);
  r.per_class_accuracy.assign(c, 0.0);
  std::size_t correct = 0;
  double loss = 0;
  for (const auto& v : videos) {
    if (v.prediction.num_classes() != c || v.label >= c) {
      throw ValidationError(fmt::format("video '{}': {} scores / label {} for {} classes",
                                        v.video_id, v.prediction.num_classes(),
                                        v.label, c));
    }
    const std::size_t pred = v.prediction.argmax();
    ++r.confusion[v.label][pred];
    ++r.per_class_videos[v.label];
    correct += pred == v.label;
    loss += CrossEntropy(v.prediction, v.label);
  }
  for (std::size_t k = 0; k < c; ++k) {
    r.per_class_accuracy[k] =
        r.per_class_videos[k] == 0
            ? 0.0
            : static_cast<double>(r.confusion[k][k]) / static_cast<double>(r.per_class_videos[k]);
  }
  if (!videos.empty()) {
    r.accuracy = static_cast<double>(correct) / static_cast<double>(videos.size());
    r.loss = loss / static_cast<double>(videos.size());
  }
  r.videos = std::move(videos);
  return r;
}

EvalResult Evaluate(const Model& model, const LoadedSplit& split,
                    const ClipProtocol& protocol, std::size_t batch) {
  if (split.classes.size() != model.num_classes()) {
    throw ValidationError(fmt::format("checkpoint has {} classes, manifest has {}",
                                      model.num_classes(), split.classes.size()));
  }
  if (split.dim() != model.stack.input) {
    throw ShapeError(fmt::format("{} features are {} wide, model expects {}",
                                 LevelName(split.level), split.dim(), model.stack.input));
  }
  if (batch == 0) throw ValidationError("evaluation batch must be >= 1");
  RetainFreedMemory();
  const std::vector<ClipSample> samples = ExpandClips(split, protocol);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<PredictionVector>> per_video(split.size());
  const Provenance provenance =
      model.pool == Pooling::kMean ? Provenance::kMeanPooled : Provenance::kMaxPooled;
  for (std::size_t begin = 0; begin < samples.size(); begin += batch) {
    const std::size_t end = std::min(samples.size(), begin + batch);
    const Tensor x = GatherBatch(split, samples, order, begin, end);
    Graph<float> graph;
    const Tensor& logits = ModelLogits(graph, model, x, false, 0, false).value();
    const std::size_t classes = logits.dim(1);
    std::vector<double> row(classes);
    for (std::size_t b = 0; b < end - begin; ++b) {
      for (std::size_t j = 0; j < classes; ++j) row[j] = logits[b * classes + j];
      per_video[samples[begin + b].video].push_back({Softmax(row), provenance});
    }
  }
  std::vector<VideoPrediction> videos;
  for (std::size_t v = 0; v < split.size(); ++v) {
    videos.push_back({split.video_ids[v], split.labels[v], AggregateClips(per_video[v])});
  }
  return Score(std::string(LevelName(split.level)), split.classes, std::move(videos));
}

EvalResult FuseEvaluations(const EvalResult& high, const EvalResult& mid,
                           const EvalResult& low, const FusionWeights& weights) {
  weights.Validate();
  if (high.classes != mid.classes || high.classes != low.classes) {
    throw ValidationError("fuse: the three evaluations use different class tables");
  }
  auto index = [](const EvalResult& r) {
    std::map<std::string, const VideoPrediction*> m;
    for (const auto& v : r.videos) m[v.video_id] = &v;
    return m;
  };
  const auto mid_by_id = index(mid), low_by_id = index(low);
  if (mid_by_id.size() != high.videos.size() || low_by_id.size() != high.videos.size()) {
    throw ValidationError(fmt::format("fuse: video counts differ (high {}, mid {}, low {})",
                                      high.videos.size(), mid.videos.size(),
                                      low.videos.size()));
  }
  std::vector<VideoPrediction> fused;
  for (const auto& h : high.videos) {
    auto m = mid_by_id.find(h.video_id);
    auto l = low_by_id.find(h.video_id);
    if (m == mid_by_id.end() || l == low_by_id.end()) {
      throw ValidationError("fuse: video '" + h.video_id + "' missing from the " +
                            (m == mid_by_id.end() ? "mid" : "low") + " evaluation");
    }
    if (m->second->label != h.label || l->second->label != h.label) {
      throw ValidationError("fuse: video '" + h.video_id + "' has conflicting labels");
    }
    fused.push_back({h.video_id, h.label,
                     FuseLevels(h.prediction, m->second->prediction,
                                l->second->prediction, weights)});
  }
  return Score("fused", high.classes, std::move(fused));
}

}  // namespace mrrn
