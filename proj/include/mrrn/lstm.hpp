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

// Conventional LSTM cell, kept as the throughput and accuracy baseline:
//
//   i = sigmoid(x W_xi + h W_hi + b_i)    f = sigmoid(x W_xf + h W_hf + b_f)
//   o = sigmoid(x W_xo + h W_ho + b_o)    g = tanh(x W_xg + h W_hg + b_g)
//   c' = f * c + i * g                    h' = o * tanh(c')

#ifndef MRRN_LSTM_HPP_
#define MRRN_LSTM_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "mrrn/autograd.hpp"

namespace mrrn {

enum LstmGate : std::size_t { kInputGate, kForgetGate, kOutputGate, kCandidate };
inline constexpr std::size_t kLstmGates = 4;

template <typename T>
struct LstmParams {
  std::array<BasicTensor<T>, kLstmGates> w_x;  // [input, hidden]
  std::array<BasicTensor<T>, kLstmGates> w_h;  // [hidden, hidden]
  std::array<BasicTensor<T>, kLstmGates> b;    // [hidden]

  std::size_t input_size() const { return w_x[0].dim(0); }
  std::size_t hidden_size() const { return w_x[0].dim(1); }

  void Validate() const;

  static LstmParams Orthogonal(std::size_t input, std::size_t hidden,
                               std::uint64_t seed);
  static LstmParams Zeros(std::size_t input, std::size_t hidden);
};

template <typename T>
struct LstmVars {
  std::array<Var<T>, kLstmGates> w_x, w_h, b;

  std::size_t input_size() const { return w_x[0].shape()[0]; }
  std::size_t hidden_size() const { return w_x[0].shape()[1]; }
};

template <typename T>
LstmVars<T> BindLstm(Graph<T>& graph, const LstmParams<T>& p,
                     const std::string& prefix);

template <typename T>
LstmVars<T> BindLstmConstant(Graph<T>& graph, const LstmParams<T>& p);

template <typename T>
struct LstmStepOutput {
  Var<T> h;
  Var<T> c;
};

// x [B, input]; h_prev, c_prev [B, hidden].
template <typename T>
LstmStepOutput<T> LstmCellStep(Var<T> x, Var<T> h_prev, Var<T> c_prev,
                               const LstmVars<T>& p);

// x [T, B, input] -> h [T, B, hidden], h_0 = c_0 = 0. Input projections are
// batched over time; the recurrent products run step by step.
template <typename T>
Var<T> LstmLayerForward(Var<T> x, const LstmVars<T>& p);

}  // namespace mrrn

#endif  // MRRN_LSTM_HPP_
