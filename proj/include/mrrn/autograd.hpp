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

// Tape-based reverse-mode differentiation over BasicTensor.
//
// A Graph records every primitive applied to its variables in creation order,
// which is also a valid topological order: a node can only reference inputs
// that already exist. Backward() walks the tape in reverse and accumulates
// gradients into the leaves created by Graph::Parameter().

#ifndef MRRN_AUTOGRAD_HPP_
#define MRRN_AUTOGRAD_HPP_

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrrn/tensor.hpp"

namespace mrrn {

enum class Primitive {
  kParameter,
  kConstant,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kAddRowVector,
  kAffine,
  kSigmoid,
  kTanh,
  kExp,
  kLog,
  kMean,
  kMax,
  kSum,
  kConcat,
  kReshape,
  kSlice,
  kCustom,
};

std::string_view PrimitiveName(Primitive op);

template <typename T>
class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while its graph lives.
template <typename T>
class Var {
 public:
  Var() = default;

  Graph<T>* graph() const { return graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

  const BasicTensor<T>& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Graph<T>;
  Var(Graph<T>* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph<T>* graph_ = nullptr;
  std::size_t id_ = 0;
};

// View handed to a node's backward function.
template <typename T>
class BackwardContext {
 public:
  std::size_t num_inputs() const { return inputs_.size(); }
  const BasicTensor<T>& input(std::size_t i) const;
  const BasicTensor<T>& output() const;
  bool needs_grad(std::size_t i) const;

  // Zero-initialized (on first use) gradient accumulator for input i. Only
  // call when needs_grad(i).
  BasicTensor<T>& grad(std::size_t i);

 private:
  friend class Graph<T>;
  BackwardContext(const Graph<T>& graph, std::size_t node,
                  std::vector<std::optional<BasicTensor<T>>>& grads);

  const Graph<T>& graph_;
  std::size_t node_;
  std::span<const std::size_t> inputs_;
  std::vector<std::optional<BasicTensor<T>>>& grads_;
};

// Gradient map over the parameter leaves of a graph, in creation order.
template <typename T>
class Gradients {
 public:
  struct Entry {
    std::string name;
    std::size_t leaf_id;
    BasicTensor<T> grad;
  };

  const BasicTensor<T>& operator[](Var<T> leaf) const;
  const BasicTensor<T>& operator[](std::string_view name) const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }

 private:
  friend class Graph<T>;
  std::vector<Entry> entries_;
};

template <typename T>
class Graph {
 public:
  using BackwardFn =
      std::function<void(const BasicTensor<T>& grad_out, BackwardContext<T>&)>;

  struct Node {
    Primitive op;
    std::string label;  // leaf name, or custom op name
    std::vector<std::size_t> inputs;
    BasicTensor<T> value;
    BackwardFn backward;
    bool requires_grad = false;
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf flagged as requiring a gradient.
  Var<T> Parameter(BasicTensor<T> value, std::string name);
  // Leaf that never receives a gradient (data, masks).
  Var<T> Constant(BasicTensor<T> value);

  // Appends a node. Rejects inputs from other graphs and non-finite values;
  // `label` names the operation in error messages.
  Var<T> Record(Primitive op, std::string label, BasicTensor<T> value,
                std::vector<Var<T>> inputs, BackwardFn backward);

  const Node& node(std::size_t id) const { return nodes_.at(id); }
  const BasicTensor<T>& value(Var<T> v) const { return nodes_.at(v.id()).value; }
  bool requires_grad(Var<T> v) const { return nodes_.at(v.id()).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse sweep from a scalar loss. Every parameter leaf receives an entry;
  // leaves the loss does not depend on get zeros.
  Gradients<T> Backward(Var<T> loss) const;

 private:
  // A deque keeps node values at fixed addresses as the tape grows, so
  // references from Var::value() stay valid for the graph's lifetime.
  std::deque<Node> nodes_;
};

template <typename T>
const BasicTensor<T>& Var<T>::value() const {
  return graph_->value(*this);
}

// ---------------------------------------------------------------------------
// Primitives. Every one validates its shape rule and throws ShapeError naming
// both operand shapes on mismatch.

// [..., k] x [k, m] -> [..., m]; leading extents of `a` act as rows.
template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b);
template <typename T>
Var<T> Add(Var<T> a, Var<T> b);
template <typename T>
Var<T> Sub(Var<T> a, Var<T> b);
template <typename T>
Var<T> Mul(Var<T> a, Var<T> b);
// a has trailing extent m; v has shape [m] and is added to every row of a.
template <typename T>
Var<T> AddRowVector(Var<T> a, Var<T> v);
// scale * a + shift, elementwise.
template <typename T>
Var<T> Affine(Var<T> a, T scale, T shift);
template <typename T>
Var<T> Sigmoid(Var<T> a);
template <typename T>
Var<T> Tanh(Var<T> a);
template <typename T>
Var<T> Exp(Var<T> a);
template <typename T>
Var<T> Log(Var<T> a);
// Reductions drop the reduced axis.
template <typename T>
Var<T> Mean(Var<T> a, std::size_t axis);
template <typename T>
Var<T> Max(Var<T> a, std::size_t axis);
template <typename T>
Var<T> Sum(Var<T> a);  // all elements -> scalar
template <typename T>
Var<T> Concat(std::span<const Var<T>> parts, std::size_t axis);
template <typename T>
Var<T> Reshape(Var<T> a, Shape shape);
// Keeps indices [begin, end) of `axis`.
template <typename T>
Var<T> Slice(Var<T> a, std::size_t axis, std::size_t begin, std::size_t end);

// Sizes of the dimensions before, at, and after `axis`.
struct AxisSplit {
  std::size_t outer;
  std::size_t extent;
  std::size_t inner;
};
AxisSplit SplitAtAxis(const Shape& shape, std::size_t axis);

}  // namespace mrrn

#endif  // MRRN_AUTOGRAD_HPP_
