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

#include "mrrn/head.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "mrrn/init.hpp"

namespace mrrn {

std::string_view PoolingName(Pooling pool) {
  return pool == Pooling::kMean ? "mean" : "max";
}

Pooling ParsePooling(std::string_view name) {
  if (name == "mean") return Pooling::kMean;
  if (name == "max") return Pooling::kMax;
  throw ValidationError("unknown pooling '" + std::string(name) +
                        "' (expected mean or max)");
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kMeanPooled: return "mean-pooled";
    case Provenance::kMaxPooled: return "max-pooled";
    case Provenance::kFused: return "fused";
    case Provenance::kVideoLevel: return "video-level";
  }
  return "unknown";
}

std::size_t PredictionVector::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool PredictionVector::OnSimplex(double tol) const {
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0.0)) return false;
    total += p;
  }
  return !probs.empty() && std::abs(total - 1.0) <= tol;
}

// ---------------------------------------------------------------------------

template <typename T>
void ClassifierParams<T>::Validate() const {
  if (w.rank() != 2) {
    throw ShapeError("classifier W must be [hidden, classes], got " +
                     ShapeToString(w.shape()));
  }
  if (w.dim(1) < 2) {
    throw ValidationError("classifier needs >= 2 classes, got " +
                          std::to_string(w.dim(1)));
  }
  if (b && b->shape() != Shape{w.dim(1)}) {
    throw ShapeError("classifier bias " + ShapeToString(b->shape()) +
                     " does not match " + std::to_string(w.dim(1)) +
                     " classes");
  }
}

template <typename T>
ClassifierParams<T> ClassifierParams<T>::Init(std::size_t hidden,
                                              std::size_t classes,
                                              std::uint64_t seed,
                                              bool with_bias) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(hidden));
  ClassifierParams<T> p{
      UniformInit({hidden, classes}, bound, seed).template Cast<T>(),
      std::nullopt};
  if (with_bias) p.b = BasicTensor<T>({classes});
  p.Validate();
  return p;
}

template <typename T>
ClassifierVars<T> BindClassifier(Graph<T>& graph, const ClassifierParams<T>& p,
                                 const std::string& prefix) {
  p.Validate();
  ClassifierVars<T> v{graph.Parameter(p.w, prefix + ".W"), std::nullopt};
  if (p.b) v.b = graph.Parameter(*p.b, prefix + ".b");
  return v;
}

template <typename T>
Var<T> StepLogits(Var<T> r, const ClassifierVars<T>& p) {
  const Shape& rs = r.shape();
  const std::size_t hidden = p.w.shape()[0], classes = p.w.shape()[1];
  if (rs.size() != 3 || rs[2] != hidden) {
    throw ShapeError("classifier: representations " + ShapeToString(rs) +
                     " are not [T, B, " + std::to_string(hidden) + "]");
  }
  if (rs[0] == 0) throw ValidationError("classifier: T = 0");
  Var<T> logits = MatMul(Reshape(r, {rs[0] * rs[1], hidden}), p.w);
  if (p.b) logits = AddRowVector(logits, *p.b);
  return Reshape(logits, {rs[0], rs[1], classes});
}

template <typename T>
Var<T> PooledLogits(Var<T> r, const ClassifierVars<T>& p, Pooling pool) {
  Var<T> logits = StepLogits(r, p);
  return pool == Pooling::kMean ? Mean(logits, 0) : Max(logits, 0);
}

template <typename T>
Var<T> SoftmaxCrossEntropy(Var<T> logits, std::span<const std::size_t> labels) {
  const Shape& ls = logits.shape();
  if (ls.size() != 2) {
    throw ShapeError("cross_entropy: logits must be [B, classes], got " +
                     ShapeToString(ls));
  }
  const std::size_t batch = ls[0], classes = ls[1];
  if (labels.size() != batch) {
    throw ShapeError("cross_entropy: " + std::to_string(labels.size()) +
                     " labels for batch of " + std::to_string(batch));
  }
  for (std::size_t label : labels) {
    if (label >= classes) {
      throw ValidationError("cross_entropy: label " + std::to_string(label) +
                            " out of range for " + std::to_string(classes) +
                            " classes");
    }
  }
  const auto& z = logits.value();
  auto probs = std::make_shared<BasicTensor<T>>(ls);
  T total = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    const T* row = &z[i * classes];
    const T peak = *std::max_element(row, row + classes);
    T sum = 0;
    for (std::size_t j = 0; j < classes; ++j) sum += std::exp(row[j] - peak);
    const T lse = peak + std::log(sum);
    for (std::size_t j = 0; j < classes; ++j) {
      (*probs)[i * classes + j] = std::exp(row[j] - lse);
    }
    total += lse - row[labels[i]];
  }
  std::vector<std::size_t> owned(labels.begin(), labels.end());
  return logits.graph()->Record(
      Primitive::kCustom, "softmax_cross_entropy",
      BasicTensor<T>::Scalar(total / static_cast<T>(batch)), {logits},
      [probs, owned = std::move(owned), batch, classes](
          const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        // d/dz = (p - onehot) / B
        auto& d = ctx.grad(0);
        const T scale = g[0] / static_cast<T>(batch);
        for (std::size_t i = 0; i < batch; ++i) {
          for (std::size_t j = 0; j < classes; ++j) {
            const T onehot = j == owned[i] ? T{1} : T{0};
            d[i * classes + j] += scale * ((*probs)[i * classes + j] - onehot);
          }
        }
      });
}

std::vector<double> Softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(logits[j] - peak);
    sum += out[j];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

template <typename T>
PredictionVector Predict(const BasicTensor<T>& r, const ClassifierParams<T>& p,
                         Pooling pool) {
  p.Validate();
  const std::size_t hidden = p.hidden_size(), classes = p.num_classes();
  const bool matrix = r.rank() == 2;
  const bool seq = r.rank() == 3 && r.dim(1) == 1;
  if ((!matrix && !seq) || r.shape().back() != hidden) {
    throw ShapeError("predict: representations " + ShapeToString(r.shape()) +
                     " are not [T, " + std::to_string(hidden) + "]");
  }
  const std::size_t steps = r.dim(0);
  std::vector<double> pooled(classes,
                             pool == Pooling::kMean ? 0.0 : -INFINITY);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t j = 0; j < classes; ++j) {
      double z = p.b ? static_cast<double>((*p.b)[j]) : 0.0;
      for (std::size_t i = 0; i < hidden; ++i) {
        z += static_cast<double>(r[t * hidden + i]) *
             static_cast<double>(p.w.at(i, j));
      }
      pooled[j] = pool == Pooling::kMean ? pooled[j] + z : std::max(pooled[j], z);
    }
  }
  if (pool == Pooling::kMean) {
    for (double& z : pooled) z /= static_cast<double>(steps);
  }
  return {Softmax(pooled), pool == Pooling::kMean ? Provenance::kMeanPooled
                                                  : Provenance::kMaxPooled};
}

}  // namespace

template <typename T>
PredictionVector PredictMean(const BasicTensor<T>& r,
                             const ClassifierParams<T>& p) {
  return Predict(r, p, Pooling::kMean);
}

template <typename T>
PredictionVector PredictMax(const BasicTensor<T>& r,
                            const ClassifierParams<T>& p) {
  return Predict(r, p, Pooling::kMax);
}

double CrossEntropyFromLogits(std::span<const double> logits,
                              std::size_t label) {
  if (label >= logits.size()) {
    throw ValidationError("cross_entropy: label " + std::to_string(label) +
                          " out of range for " +
                          std::to_string(logits.size()) + " classes");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double z : logits) sum += std::exp(z - peak);
  return peak + std::log(sum) - logits[label];
}

double CrossEntropy(const PredictionVector& prediction, std::size_t label) {
  if (label >= prediction.num_classes()) {
    throw ValidationError("cross_entropy: label " + std::to_string(label) +
                          " out of range for " +
                          std::to_string(prediction.num_classes()) +
                          " classes");
  }
  const double p = prediction.probs[label];
  if (!(p > 0.0)) {
    throw NumericError("cross_entropy: probability of label " +
                       std::to_string(label) + " is zero");
  }
  return -std::log(p);
}

void FusionWeights::Validate() const {
  if (high < 0 || mid < 0 || low < 0) {
    throw ValidationError("fusion weights must be non-negative");
  }
  if (std::abs(high + mid + low - 1.0) > 1e-9) {
    throw ValidationError("fusion weights must sum to 1, got " +
                          std::to_string(high + mid + low));
  }
}

FusionWeights FusionWeights::Parse(std::string_view csv) {
  std::vector<double> values;
  std::stringstream in{std::string(csv)};
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("fusion weights: cannot parse '" + item + "'");
    }
  }
  if (values.size() != 3) {
    throw ValidationError("fusion weights: expected a,b,c, got '" +
                          std::string(csv) + "'");
  }
  FusionWeights w{values[0], values[1], values[2]};
  w.Validate();
  return w;
}

PredictionVector FuseLevels(const PredictionVector& high,
                            const PredictionVector& mid,
                            const PredictionVector& low,
                            const FusionWeights& weights) {
  weights.Validate();
  const std::size_t classes = high.num_classes();
  if (mid.num_classes() != classes || low.num_classes() != classes) {
    throw ValidationError("fuse_levels: class counts differ (high " +
                          std::to_string(classes) + ", mid " +
                          std::to_string(mid.num_classes()) + ", low " +
                          std::to_string(low.num_classes()) + ")");
  }
  PredictionVector out{std::vector<double>(classes), Provenance::kFused};
  for (std::size_t j = 0; j < classes; ++j) {
    out.probs[j] = weights.high * high.probs[j] + weights.mid * mid.probs[j] +
                   weights.low * low.probs[j];
  }
  return out;
}

PredictionVector AggregateClips(std::span<const PredictionVector> clips) {
  if (clips.empty()) throw ValidationError("aggregate_clips: no clips");
  const std::size_t classes = clips[0].num_classes();
  PredictionVector out{std::vector<double>(classes, 0.0),
                       Provenance::kVideoLevel};
  for (const auto& clip : clips) {
    if (clip.num_classes() != classes) {
      throw ValidationError("aggregate_clips: class counts differ (" +
                            std::to_string(classes) + " vs " +
                            std::to_string(clip.num_classes()) + ")");
    }
    for (std::size_t j = 0; j < classes; ++j) out.probs[j] += clip.probs[j];
  }
  const double inv = 1.0 / static_cast<double>(clips.size());
  for (double& v : out.probs) v *= inv;
  return out;
}

#define MRRN_INSTANTIATE_HEAD(T)                                              \
  template struct ClassifierParams<T>;                                        \
  template ClassifierVars<T> BindClassifier(Graph<T>&,                        \
                                            const ClassifierParams<T>&,       \
                                            const std::string&);              \
  template Var<T> StepLogits(Var<T>, const ClassifierVars<T>&);               \
  template Var<T> PooledLogits(Var<T>, const ClassifierVars<T>&, Pooling);    \
  template Var<T> SoftmaxCrossEntropy(Var<T>, std::span<const std::size_t>);  \
  template PredictionVector PredictMean(const BasicTensor<T>&,                \
                                        const ClassifierParams<T>&);          \
  template PredictionVector PredictMax(const BasicTensor<T>&,                 \
                                       const ClassifierParams<T>&);

MRRN_INSTANTIATE_HEAD(float)
MRRN_INSTANTIATE_HEAD(double)

#undef MRRN_INSTANTIATE_HEAD

}  // namespace mrrn
