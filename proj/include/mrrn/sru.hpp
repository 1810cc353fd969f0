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

// Simple Recurrent Unit layers.
//
//   x~_t = x_t W
//   f_t  = sigmoid(x_t W_f + b_f)
//   r_t  = sigmoid(x_t W_r + b_r)
//   c_t  = f_t * c_{t-1} + (1 - f_t) * x~_t
//   h_t  = r_t * tanh(c_t) + (1 - r_t) * hw(x_t)
//
// hw is the identity when input and hidden sizes agree and x_t W_h otherwise.
// No gate reads h_{t-1}, so every projection for a whole sequence is one
// matrix product and only the elementwise c recurrence is sequential.
//
// Sequences are laid out time-major: [T, B, features].

#ifndef MRRN_SRU_HPP_
#define MRRN_SRU_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrrn/autograd.hpp"

namespace mrrn {

template <typename T>
struct SruLayerParams {
  BasicTensor<T> w;    // [input, hidden]
  BasicTensor<T> w_f;  // [input, hidden]
  BasicTensor<T> w_r;  // [input, hidden]
  BasicTensor<T> b_f;  // [hidden]
  BasicTensor<T> b_r;  // [hidden]
  std::optional<BasicTensor<T>> w_h;  // [input, hidden], iff input != hidden

  std::size_t input_size() const { return w.dim(0); }
  std::size_t hidden_size() const { return w.dim(1); }

  void Validate() const;

  // Orthogonal matrices, zero biases.
  static SruLayerParams Orthogonal(std::size_t input, std::size_t hidden,
                                   std::uint64_t seed);
  static SruLayerParams Zeros(std::size_t input, std::size_t hidden);

  template <typename U>
  SruLayerParams<U> Cast() const {
    SruLayerParams<U> out{w.template Cast<U>(),   w_f.template Cast<U>(),
                          w_r.template Cast<U>(), b_f.template Cast<U>(),
                          b_r.template Cast<U>(), std::nullopt};
    if (w_h) out.w_h = w_h->template Cast<U>();
    return out;
  }
};

// Graph leaves for one layer.
template <typename T>
struct SruLayerVars {
  Var<T> w, w_f, w_r, b_f, b_r;
  std::optional<Var<T>> w_h;

  std::size_t input_size() const { return w.shape()[0]; }
  std::size_t hidden_size() const { return w.shape()[1]; }
};

// Registers the layer's tensors as parameters named "<prefix>.W" etc.
template <typename T>
SruLayerVars<T> BindSruLayer(Graph<T>& graph, const SruLayerParams<T>& p,
                             const std::string& prefix);

// Same, but as constants (no gradient).
template <typename T>
SruLayerVars<T> BindSruLayerConstant(Graph<T>& graph,
                                     const SruLayerParams<T>& p);

template <typename T>
struct SruStepOutput {
  Var<T> h;
  Var<T> c;
};

// One time step for a batch: x [B, input], c_prev [B, hidden].
template <typename T>
SruStepOutput<T> SruCellStep(Var<T> x, Var<T> c_prev, const SruLayerVars<T>& p);

// Elementwise recurrence over precomputed projections, all [T, B, hidden].
// c_0 = 0. Returns h [T, B, hidden].
template <typename T>
Var<T> SruScan(Var<T> x_tilde, Var<T> f, Var<T> r, Var<T> highway);

// Two-phase evaluation: batched projections, then SruScan. x [T, B, input].
template <typename T>
Var<T> SruLayerForward(Var<T> x, const SruLayerVars<T>& p);

// Reference evaluation that iterates SruCellStep one step at a time.
template <typename T>
Var<T> SruLayerForwardNaive(Var<T> x, const SruLayerVars<T>& p);

struct StackConfig {
  std::size_t layers = 3;
  std::size_t hidden = 1024;
  std::size_t input = 512;
  double dropout = 0.5;

  void Validate() const;
};

template <typename T>
std::vector<SruLayerParams<T>> InitSruStack(const StackConfig& cfg,
                                            std::uint64_t seed);

// Inverted dropout: zero with probability p, scale survivors by 1/(1-p).
template <typename T>
Var<T> Dropout(Var<T> x, double p, std::uint64_t seed);

// Stacked layers: layer k >= 2 adds its input back (identity skip) when the
// extents agree; dropout between layers in train mode; tanh on the top
// layer's output. Returns r [T, B, hidden].
template <typename T>
Var<T> StackForward(Var<T> x, const StackConfig& cfg,
                    std::span<const SruLayerVars<T>> layers, bool train_mode,
                    std::uint64_t seed);

}  // namespace mrrn

#endif  // MRRN_SRU_HPP_
