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

#include "mrrn/lstm.hpp"

#include <vector>

#include "mrrn/init.hpp"

namespace mrrn {

namespace {

constexpr const char* kGateNames[kLstmGates] = {"i", "f", "o", "g"};

template <typename T>
Var<T> GateActivation(std::size_t gate, Var<T> pre) {
  return gate == kCandidate ? Tanh(pre) : Sigmoid(pre);
}

}  // namespace

template <typename T>
void LstmParams<T>::Validate() const {
  const std::size_t in = w_x[0].rank() == 2 ? w_x[0].dim(0) : 0;
  const std::size_t hid = w_x[0].rank() == 2 ? w_x[0].dim(1) : 0;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    if (w_x[g].shape() != Shape{in, hid} || w_h[g].shape() != Shape{hid, hid} ||
        b[g].shape() != Shape{hid}) {
      throw ShapeError(std::string("LSTM gate ") + kGateNames[g] +
                       " shapes W_x " + ShapeToString(w_x[g].shape()) +
                       ", W_h " + ShapeToString(w_h[g].shape()) + ", b " +
                       ShapeToString(b[g].shape()) +
                       " inconsistent with hidden size " + std::to_string(hid));
    }
  }
}

template <typename T>
LstmParams<T> LstmParams<T>::Orthogonal(std::size_t input, std::size_t hidden,
                                        std::uint64_t seed) {
  LstmParams<T> p;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    p.w_x[g] = OrthogonalInitD(input, hidden, MixSeed(seed, 2 * g)).Cast<T>();
    p.w_h[g] =
        OrthogonalInitD(hidden, hidden, MixSeed(seed, 2 * g + 1)).Cast<T>();
    p.b[g] = BasicTensor<T>({hidden});
  }
  return p;
}

template <typename T>
LstmParams<T> LstmParams<T>::Zeros(std::size_t input, std::size_t hidden) {
  LstmParams<T> p;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    p.w_x[g] = BasicTensor<T>({input, hidden});
    p.w_h[g] = BasicTensor<T>({hidden, hidden});
    p.b[g] = BasicTensor<T>({hidden});
  }
  return p;
}

template <typename T>
LstmVars<T> BindLstm(Graph<T>& graph, const LstmParams<T>& p,
                     const std::string& prefix) {
  p.Validate();
  LstmVars<T> v;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    const std::string gate = kGateNames[g];
    v.w_x[g] = graph.Parameter(p.w_x[g], prefix + ".W_x" + gate);
    v.w_h[g] = graph.Parameter(p.w_h[g], prefix + ".W_h" + gate);
    v.b[g] = graph.Parameter(p.b[g], prefix + ".b_" + gate);
  }
  return v;
}

template <typename T>
LstmVars<T> BindLstmConstant(Graph<T>& graph, const LstmParams<T>& p) {
  p.Validate();
  LstmVars<T> v;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    v.w_x[g] = graph.Constant(p.w_x[g]);
    v.w_h[g] = graph.Constant(p.w_h[g]);
    v.b[g] = graph.Constant(p.b[g]);
  }
  return v;
}

template <typename T>
LstmStepOutput<T> LstmCellStep(Var<T> x, Var<T> h_prev, Var<T> c_prev,
                               const LstmVars<T>& p) {
  if (x.shape().size() != 2 || x.shape()[1] != p.input_size()) {
    throw ShapeError("lstm_cell_step: input " + ShapeToString(x.shape()) +
                     " does not match input size " +
                     std::to_string(p.input_size()));
  }
  const Shape state{x.shape()[0], p.hidden_size()};
  if (h_prev.shape() != state || c_prev.shape() != state) {
    throw ShapeError("lstm_cell_step: state shapes " +
                     ShapeToString(h_prev.shape()) + ", " +
                     ShapeToString(c_prev.shape()) + " expected " +
                     ShapeToString(state));
  }
  std::array<Var<T>, kLstmGates> gate;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    Var<T> pre = Add(MatMul(x, p.w_x[g]), MatMul(h_prev, p.w_h[g]));
    gate[g] = GateActivation(g, AddRowVector(pre, p.b[g]));
  }
  Var<T> c = Add(Mul(gate[kForgetGate], c_prev),
                 Mul(gate[kInputGate], gate[kCandidate]));
  Var<T> h = Mul(gate[kOutputGate], Tanh(c));
  return {h, c};
}

template <typename T>
Var<T> LstmLayerForward(Var<T> x, const LstmVars<T>& p) {
  const Shape& xs = x.shape();
  if (xs.size() != 3 || xs[2] != p.input_size()) {
    throw ShapeError("lstm_layer_forward: input " + ShapeToString(xs) +
                     " is not [T, B, " + std::to_string(p.input_size()) + "]");
  }
  const std::size_t steps = xs[0], batch = xs[1], hidden = p.hidden_size();
  Graph<T>& graph = *x.graph();
  Var<T> flat = Reshape(x, {steps * batch, xs[2]});
  std::array<Var<T>, kLstmGates> projected;
  for (std::size_t g = 0; g < kLstmGates; ++g) {
    projected[g] = Reshape(AddRowVector(MatMul(flat, p.w_x[g]), p.b[g]),
                           {steps, batch, hidden});
  }
  Var<T> h = graph.Constant(BasicTensor<T>({batch, hidden}));
  Var<T> c = graph.Constant(BasicTensor<T>({batch, hidden}));
  std::vector<Var<T>> outputs;
  for (std::size_t t = 0; t < steps; ++t) {
    std::array<Var<T>, kLstmGates> gate;
    for (std::size_t g = 0; g < kLstmGates; ++g) {
      Var<T> xg = Reshape(Slice(projected[g], 0, t, t + 1), {batch, hidden});
      gate[g] = GateActivation(g, Add(xg, MatMul(h, p.w_h[g])));
    }
    c = Add(Mul(gate[kForgetGate], c), Mul(gate[kInputGate], gate[kCandidate]));
    h = Mul(gate[kOutputGate], Tanh(c));
    outputs.push_back(Reshape(h, {1, batch, hidden}));
  }
  return Concat<T>(outputs, 0);
}

#define MRRN_INSTANTIATE_LSTM(T)                                            \
  template struct LstmParams<T>;                                            \
  template LstmVars<T> BindLstm(Graph<T>&, const LstmParams<T>&,            \
                                const std::string&);                        \
  template LstmVars<T> BindLstmConstant(Graph<T>&, const LstmParams<T>&);   \
  template LstmStepOutput<T> LstmCellStep(Var<T>, Var<T>, Var<T>,           \
                                          const LstmVars<T>&);              \
  template Var<T> LstmLayerForward(Var<T>, const LstmVars<T>&);

MRRN_INSTANTIATE_LSTM(float)
MRRN_INSTANTIATE_LSTM(double)

#undef MRRN_INSTANTIATE_LSTM

}  // namespace mrrn
