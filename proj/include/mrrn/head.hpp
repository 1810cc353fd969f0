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

// Temporal-pooling softmax classifier, score fusion across feature levels,
// and clip-to-video aggregation.
//
// Pooling happens on logits, before the softmax:
//   P_mean(j) = softmax_j( (1/T) sum_t (r_t W)_j )
//   P_max(j)  = softmax_j( max_t (r_t W)_j )

#ifndef MRRN_HEAD_HPP_
#define MRRN_HEAD_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrrn/autograd.hpp"

namespace mrrn {

enum class Pooling { kMean, kMax };

std::string_view PoolingName(Pooling pool);
Pooling ParsePooling(std::string_view name);

enum class Provenance { kMeanPooled, kMaxPooled, kFused, kVideoLevel };

std::string_view ProvenanceName(Provenance p);

inline constexpr double kSimplexTolerance = 1e-6;

struct PredictionVector {
  std::vector<double> probs;
  Provenance provenance = Provenance::kMeanPooled;

  std::size_t num_classes() const { return probs.size(); }
  // First index of the largest probability.
  std::size_t argmax() const;
  bool OnSimplex(double tol = kSimplexTolerance) const;
};

template <typename T>
struct ClassifierParams {
  BasicTensor<T> w;                // [hidden, classes], shared over time
  std::optional<BasicTensor<T>> b;  // [classes]

  std::size_t hidden_size() const { return w.dim(0); }
  std::size_t num_classes() const { return w.dim(1); }

  void Validate() const;

  // U(-1/sqrt(hidden), 1/sqrt(hidden)) weights, zero bias.
  static ClassifierParams Init(std::size_t hidden, std::size_t classes,
                               std::uint64_t seed, bool with_bias = true);
};

template <typename T>
struct ClassifierVars {
  Var<T> w;
  std::optional<Var<T>> b;
};

template <typename T>
ClassifierVars<T> BindClassifier(Graph<T>& graph, const ClassifierParams<T>& p,
                                 const std::string& prefix);

// r [T, B, hidden] -> per-step logits [T, B, classes].
template <typename T>
Var<T> StepLogits(Var<T> r, const ClassifierVars<T>& p);

// r [T, B, hidden] -> pooled logits [B, classes].
template <typename T>
Var<T> PooledLogits(Var<T> r, const ClassifierVars<T>& p, Pooling pool);

// Mean over the batch of -log softmax(logits)[label], via log-sum-exp.
// logits [B, classes].
template <typename T>
Var<T> SoftmaxCrossEntropy(Var<T> logits, std::span<const std::size_t> labels);

std::vector<double> Softmax(std::span<const double> logits);

// Single sequence r [T, hidden] (or [T, 1, hidden]).
template <typename T>
PredictionVector PredictMean(const BasicTensor<T>& r,
                             const ClassifierParams<T>& p);
template <typename T>
PredictionVector PredictMax(const BasicTensor<T>& r,
                            const ClassifierParams<T>& p);

// -log p_label, computed as logsumexp(logits) - logits[label].
double CrossEntropyFromLogits(std::span<const double> logits,
                              std::size_t label);
double CrossEntropy(const PredictionVector& prediction, std::size_t label);

// Weights for the high-, mid- and low-level streams.
struct FusionWeights {
  double high = 0.7;
  double mid = 0.2;
  double low = 0.1;

  void Validate() const;
  static FusionWeights Parse(std::string_view csv);  // "a,b,c"
};

PredictionVector FuseLevels(const PredictionVector& high,
                            const PredictionVector& mid,
                            const PredictionVector& low,
                            const FusionWeights& weights);

// Arithmetic mean of per-clip distributions.
PredictionVector AggregateClips(std::span<const PredictionVector> clips);

}  // namespace mrrn

#endif  // MRRN_HEAD_HPP_
