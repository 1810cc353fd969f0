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

#include "mrrn/autograd.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mrrn/linalg.hpp"
#include "mrrn/vmath.hpp"

namespace mrrn {

std::string_view PrimitiveName(Primitive op) {
  switch (op) {
    case Primitive::kParameter: return "parameter";
    case Primitive::kConstant: return "constant";
    case Primitive::kMatMul: return "matmul";
    case Primitive::kAdd: return "add";
    case Primitive::kSub: return "sub";
    case Primitive::kMul: return "mul";
    case Primitive::kAddRowVector: return "add_row_vector";
    case Primitive::kAffine: return "affine";
    case Primitive::kSigmoid: return "sigmoid";
    case Primitive::kTanh: return "tanh";
    case Primitive::kExp: return "exp";
    case Primitive::kLog: return "log";
    case Primitive::kMean: return "mean";
    case Primitive::kMax: return "max";
    case Primitive::kSum: return "sum";
    case Primitive::kConcat: return "concat";
    case Primitive::kReshape: return "reshape";
    case Primitive::kSlice: return "slice";
    case Primitive::kCustom: return "custom";
  }
  return "unknown";
}

AxisSplit SplitAtAxis(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw ShapeError("axis " + std::to_string(axis) +
                     " out of range for shape " + ShapeToString(shape));
  }
  AxisSplit s{1, shape[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

// ---------------------------------------------------------------------------
// BackwardContext

template <typename T>
BackwardContext<T>::BackwardContext(
    const Graph<T>& graph, std::size_t node,
    std::vector<std::optional<BasicTensor<T>>>& grads)
    : graph_(graph),
      node_(node),
      inputs_(graph.node(node).inputs),
      grads_(grads) {}

template <typename T>
const BasicTensor<T>& BackwardContext<T>::input(std::size_t i) const {
  return graph_.node(inputs_[i]).value;
}

template <typename T>
const BasicTensor<T>& BackwardContext<T>::output() const {
  return graph_.node(node_).value;
}

template <typename T>
bool BackwardContext<T>::needs_grad(std::size_t i) const {
  return graph_.node(inputs_[i]).requires_grad;
}

template <typename T>
BasicTensor<T>& BackwardContext<T>::grad(std::size_t i) {
  auto& slot = grads_[inputs_[i]];
  if (!slot) slot.emplace(graph_.node(inputs_[i]).value.shape());
  return *slot;
}

// ---------------------------------------------------------------------------
// Gradients

template <typename T>
const BasicTensor<T>& Gradients<T>::operator[](Var<T> leaf) const {
  for (const auto& e : entries_) {
    if (e.leaf_id == leaf.id()) return e.grad;
  }
  throw ValidationError("variable " + std::to_string(leaf.id()) +
                        " is not a parameter leaf");
}

template <typename T>
const BasicTensor<T>& Gradients<T>::operator[](std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e.grad;
  }
  throw ValidationError("no parameter named '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Graph

template <typename T>
Var<T> Graph<T>::Parameter(BasicTensor<T> value, std::string name) {
  if (!value.AllFinite()) {
    throw NumericError("parameter '" + name + "' holds non-finite values");
  }
  nodes_.push_back(Node{Primitive::kParameter, std::move(name), {},
                        std::move(value), nullptr, true});
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::Constant(BasicTensor<T> value) {
  if (!value.AllFinite()) throw NumericError("constant holds non-finite values");
  nodes_.push_back(
      Node{Primitive::kConstant, "", {}, std::move(value), nullptr, false});
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Graph<T>::Record(Primitive op, std::string label, BasicTensor<T> value,
                        std::vector<Var<T>> inputs, BackwardFn backward) {
  Node node{op, std::move(label), {}, std::move(value), std::move(backward),
            false};
  node.inputs.reserve(inputs.size());
  for (const Var<T>& in : inputs) {
    if (in.graph() != this) {
      throw ValidationError(std::string(PrimitiveName(op)) +
                            ": input belongs to a different graph");
    }
    node.inputs.push_back(in.id());
    node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (!node.value.AllFinite()) {
    const std::string name =
        op == Primitive::kCustom ? node.label : std::string(PrimitiveName(op));
    throw NumericError(name + ": non-finite output of shape " +
                       ShapeToString(node.value.shape()));
  }
  nodes_.push_back(std::move(node));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Gradients<T> Graph<T>::Backward(Var<T> loss) const {
  if (loss.graph() != this) {
    throw ValidationError("backward: loss belongs to a different graph");
  }
  const BasicTensor<T>& loss_value = nodes_[loss.id()].value;
  if (loss_value.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " +
                     ShapeToString(loss_value.shape()));
  }
  std::vector<std::optional<BasicTensor<T>>> grads(nodes_.size());
  grads[loss.id()].emplace(BasicTensor<T>::Full(loss_value.shape(), T{1}));

  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!grads[id] || !n.requires_grad || !n.backward) continue;
    BackwardContext<T> ctx(*this, id, grads);
    n.backward(*grads[id], ctx);
    // Interior gradients are no longer needed once propagated.
    if (n.op != Primitive::kParameter) grads[id].reset();
  }

  Gradients<T> out;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.op != Primitive::kParameter) continue;
    BasicTensor<T> g = grads[id] ? std::move(*grads[id])
                                 : BasicTensor<T>(n.value.shape());
    out.entries_.push_back({n.label, id, std::move(g)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Primitives

namespace {

template <typename T>
void RequireSameShape(std::string_view op, const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

template <typename T>
void RequireSameGraph(std::string_view op, const Var<T>& a, const Var<T>& b) {
  if (a.graph() != b.graph() || a.graph() == nullptr) {
    throw ValidationError(std::string(op) + ": operands from different graphs");
  }
}

template <typename T>
void RequireRank(std::string_view op, const Var<T>& a, std::size_t rank) {
  if (a.shape().size() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got shape " +
                     ShapeToString(a.shape()));
  }
}

// Elementwise unary op whose derivative is expressed through input x and
// output y. `kernel(in, out, n)` fills the whole output buffer.
template <typename T, typename K, typename D>
Var<T> UnaryBulk(Primitive op, Var<T> a, K kernel, D dfdx) {
  const BasicTensor<T>& x = a.value();
  BasicTensor<T> y(x.shape());
  kernel(x.data().data(), y.data().data(), x.size());
  return a.graph()->Record(
      op, "", std::move(y), {a},
      [dfdx](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        const auto& xin = ctx.input(0);
        const auto& yout = ctx.output();
        auto& dx = ctx.grad(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
          dx[i] += g[i] * dfdx(xin[i], yout[i]);
        }
      });
}

template <typename T, typename F, typename D>
Var<T> Unary(Primitive op, Var<T> a, F f, D dfdx) {
  return UnaryBulk(
      op, a,
      [f](const T* in, T* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(in[i]);
      },
      dfdx);
}

}  // namespace

template <typename T>
Var<T> MatMul(Var<T> a, Var<T> b) {
  RequireSameGraph("matmul", a, b);
  RequireRank("matmul", b, 2);
  if (a.shape().size() < 2) {
    throw ShapeError("matmul: left operand needs rank >= 2, got " +
                     ShapeToString(a.shape()));
  }
  const std::size_t k = a.shape().back(), m = b.shape()[1];
  const std::size_t n = a.value().size() / k;
  if (b.shape()[0] != k) {
    throw ShapeError("matmul: inner extents differ " +
                     ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()));
  }
  Shape out_shape = a.shape();
  out_shape.back() = m;
  BasicTensor<T> out(std::move(out_shape));
  linalg::Gemm(false, false, n, m, k, a.value().data().data(),
               b.value().data().data(), out.data().data(), false);
  return a.graph()->Record(
      Primitive::kMatMul, "", std::move(out), {a, b},
      [n, k, m](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        if (ctx.needs_grad(0)) {
          // dA += G * B^T
          linalg::Gemm(false, true, n, k, m, g.data().data(),
                       ctx.input(1).data().data(), ctx.grad(0).data().data(),
                       true);
        }
        if (ctx.needs_grad(1)) {
          // dB += A^T * G
          linalg::Gemm(true, false, k, m, n, ctx.input(0).data().data(),
                       g.data().data(), ctx.grad(1).data().data(), true);
        }
      });
}

template <typename T>
Var<T> Add(Var<T> a, Var<T> b) {
  RequireSameGraph("add", a, b);
  RequireSameShape("add", a, b);
  BasicTensor<T> out(a.shape());
  const auto& x = a.value();
  const auto& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return a.graph()->Record(
      Primitive::kAdd, "", std::move(out), {a, b},
      [](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        for (std::size_t in = 0; in < 2; ++in) {
          if (!ctx.needs_grad(in)) continue;
          auto& d = ctx.grad(in);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
        }
      });
}

template <typename T>
Var<T> Sub(Var<T> a, Var<T> b) {
  RequireSameGraph("sub", a, b);
  RequireSameShape("sub", a, b);
  BasicTensor<T> out(a.shape());
  const auto& x = a.value();
  const auto& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return a.graph()->Record(
      Primitive::kSub, "", std::move(out), {a, b},
      [](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        if (ctx.needs_grad(0)) {
          auto& d = ctx.grad(0);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
        }
        if (ctx.needs_grad(1)) {
          auto& d = ctx.grad(1);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
        }
      });
}

template <typename T>
Var<T> Mul(Var<T> a, Var<T> b) {
  RequireSameGraph("mul", a, b);
  RequireSameShape("mul", a, b);
  BasicTensor<T> out(a.shape());
  const auto& x = a.value();
  const auto& y = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return a.graph()->Record(
      Primitive::kMul, "", std::move(out), {a, b},
      [](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        const auto& x0 = ctx.input(0);
        const auto& x1 = ctx.input(1);
        if (ctx.needs_grad(0)) {
          auto& d = ctx.grad(0);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * x1[i];
        }
        if (ctx.needs_grad(1)) {
          auto& d = ctx.grad(1);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * x0[i];
        }
      });
}

template <typename T>
Var<T> AddRowVector(Var<T> a, Var<T> v) {
  RequireSameGraph("add_row_vector", a, v);
  RequireRank("add_row_vector", v, 1);
  if (a.shape().empty() || a.shape().back() != v.shape()[0]) {
    throw ShapeError("add_row_vector: row length of " +
                     ShapeToString(a.shape()) + " does not match vector " +
                     ShapeToString(v.shape()));
  }
  const std::size_t m = v.shape()[0];
  const auto& x = a.value();
  const auto& b = v.value();
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + b[i % m];
  return a.graph()->Record(
      Primitive::kAddRowVector, "", std::move(out), {a, v},
      [m](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        if (ctx.needs_grad(0)) {
          auto& d = ctx.grad(0);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
        }
        if (ctx.needs_grad(1)) {
          auto& d = ctx.grad(1);
          for (std::size_t i = 0; i < g.size(); ++i) d[i % m] += g[i];
        }
      });
}

template <typename T>
Var<T> Affine(Var<T> a, T scale, T shift) {
  return Unary(
      Primitive::kAffine, a, [=](T x) { return scale * x + shift; },
      [=](T, T) { return scale; });
}

template <typename T>
Var<T> Sigmoid(Var<T> a) {
  return UnaryBulk(Primitive::kSigmoid, a, vmath::Sigmoid<T>,
                   [](T, T y) { return y * (T{1} - y); });
}

template <typename T>
Var<T> Tanh(Var<T> a) {
  return UnaryBulk(Primitive::kTanh, a, vmath::Tanh<T>,
                   [](T, T y) { return T{1} - y * y; });
}

template <typename T>
Var<T> Exp(Var<T> a) {
  return UnaryBulk(Primitive::kExp, a, vmath::Exp<T>, [](T, T y) { return y; });
}

template <typename T>
Var<T> Log(Var<T> a) {
  return Unary(
      Primitive::kLog, a, [](T x) { return std::log(x); },
      [](T x, T) { return T{1} / x; });
}

namespace {

Shape DropAxis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out.push_back(shape[i]);
  }
  return out;
}

}  // namespace

template <typename T>
Var<T> Mean(Var<T> a, std::size_t axis) {
  const AxisSplit s = SplitAtAxis(a.shape(), axis);
  const auto& x = a.value();
  BasicTensor<T> out(DropAxis(a.shape(), axis));
  const T inv = T{1} / static_cast<T>(s.extent);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t e = 0; e < s.extent; ++e) {
      const T* src = &x[(o * s.extent + e) * s.inner];
      T* dst = &out[o * s.inner];
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
  return a.graph()->Record(
      Primitive::kMean, "", std::move(out), {a},
      [s, inv](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        auto& d = ctx.grad(0);
        for (std::size_t o = 0; o < s.outer; ++o) {
          for (std::size_t e = 0; e < s.extent; ++e) {
            T* dst = &d[(o * s.extent + e) * s.inner];
            const T* src = &g[o * s.inner];
            for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i] * inv;
          }
        }
      });
}

template <typename T>
Var<T> Max(Var<T> a, std::size_t axis) {
  const AxisSplit s = SplitAtAxis(a.shape(), axis);
  const auto& x = a.value();
  BasicTensor<T> out(DropAxis(a.shape(), axis));
  // Index along `axis` of the first maximum; gradient flows only there.
  std::vector<std::size_t> argmax(out.size(), 0);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      T best = x[o * s.extent * s.inner + i];
      std::size_t best_e = 0;
      for (std::size_t e = 1; e < s.extent; ++e) {
        const T v = x[(o * s.extent + e) * s.inner + i];
        if (v > best) {
          best = v;
          best_e = e;
        }
      }
      out[o * s.inner + i] = best;
      argmax[o * s.inner + i] = best_e;
    }
  }
  return a.graph()->Record(
      Primitive::kMax, "", std::move(out), {a},
      [s, argmax = std::move(argmax)](const BasicTensor<T>& g,
                                      BackwardContext<T>& ctx) {
        auto& d = ctx.grad(0);
        for (std::size_t o = 0; o < s.outer; ++o) {
          for (std::size_t i = 0; i < s.inner; ++i) {
            const std::size_t j = o * s.inner + i;
            d[(o * s.extent + argmax[j]) * s.inner + i] += g[j];
          }
        }
      });
}

template <typename T>
Var<T> Sum(Var<T> a) {
  T total = 0;
  for (T v : a.value().data()) total += v;
  return a.graph()->Record(
      Primitive::kSum, "", BasicTensor<T>::Scalar(total), {a},
      [](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        auto& d = ctx.grad(0);
        const T gv = g[0];
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += gv;
      });
}

template <typename T>
Var<T> Concat(std::span<const Var<T>> parts, std::size_t axis) {
  if (parts.empty()) throw ValidationError("concat: no inputs");
  const Shape& first = parts[0].shape();
  Shape out_shape = first;
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) +
                     " out of range for shape " + ShapeToString(first));
  }
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  for (const Var<T>& p : parts) {
    RequireSameGraph("concat", parts[0], p);
    Shape probe = p.shape();
    if (probe.size() != first.size()) {
      throw ShapeError("concat: rank mismatch " + ShapeToString(first) +
                       " vs " + ShapeToString(probe));
    }
    probe[axis] = first[axis];
    if (probe != first) {
      throw ShapeError("concat: shapes " + ShapeToString(first) + " and " +
                       ShapeToString(p.shape()) + " differ off axis " +
                       std::to_string(axis));
    }
    extents.push_back(p.shape()[axis]);
    out_shape[axis] += p.shape()[axis];
  }
  const AxisSplit s = SplitAtAxis(out_shape, axis);
  BasicTensor<T> out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& x = parts[k].value();
    const std::size_t chunk = extents[k] * s.inner;
    for (std::size_t o = 0; o < s.outer; ++o) {
      std::copy_n(&x[o * chunk], chunk,
                  &out[o * s.extent * s.inner + offset * s.inner]);
    }
    offset += extents[k];
  }
  std::vector<Var<T>> inputs(parts.begin(), parts.end());
  return parts[0].graph()->Record(
      Primitive::kConcat, "", std::move(out), std::move(inputs),
      [s, extents](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < extents.size(); ++k) {
          const std::size_t chunk = extents[k] * s.inner;
          if (ctx.needs_grad(k)) {
            auto& d = ctx.grad(k);
            for (std::size_t o = 0; o < s.outer; ++o) {
              const T* src = &g[o * s.extent * s.inner + off * s.inner];
              T* dst = &d[o * chunk];
              for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
            }
          }
          off += extents[k];
        }
      });
}

template <typename T>
Var<T> Reshape(Var<T> a, Shape shape) {
  if (ShapeSize(shape) != a.value().size()) {
    throw ShapeError("reshape: cannot view " + ShapeToString(a.shape()) +
                     " as " + ShapeToString(shape));
  }
  return a.graph()->Record(
      Primitive::kReshape, "", a.value().Reshaped(std::move(shape)), {a},
      [](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        auto& d = ctx.grad(0);
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
      });
}

template <typename T>
Var<T> Slice(Var<T> a, std::size_t axis, std::size_t begin, std::size_t end) {
  const AxisSplit s = SplitAtAxis(a.shape(), axis);
  if (begin >= end || end > s.extent) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") invalid for axis " +
                     std::to_string(axis) + " of " + ShapeToString(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[axis] = end - begin;
  const std::size_t chunk = (end - begin) * s.inner;
  const auto& x = a.value();
  BasicTensor<T> out(out_shape);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(&x[(o * s.extent + begin) * s.inner], chunk, &out[o * chunk]);
  }
  return a.graph()->Record(
      Primitive::kSlice, "", std::move(out), {a},
      [s, begin, chunk](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        auto& d = ctx.grad(0);
        for (std::size_t o = 0; o < s.outer; ++o) {
          T* dst = &d[(o * s.extent + begin) * s.inner];
          const T* src = &g[o * chunk];
          for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
        }
      });
}

#define MRRN_INSTANTIATE_AUTOGRAD(T)                                      \
  template class Graph<T>;                                                \
  template class BackwardContext<T>;                                      \
  template class Gradients<T>;                                            \
  template Var<T> MatMul(Var<T>, Var<T>);                                 \
  template Var<T> Add(Var<T>, Var<T>);                                    \
  template Var<T> Sub(Var<T>, Var<T>);                                    \
  template Var<T> Mul(Var<T>, Var<T>);                                    \
  template Var<T> AddRowVector(Var<T>, Var<T>);                           \
  template Var<T> Affine(Var<T>, T, T);                                   \
  template Var<T> Sigmoid(Var<T>);                                        \
  template Var<T> Tanh(Var<T>);                                           \
  template Var<T> Exp(Var<T>);                                            \
  template Var<T> Log(Var<T>);                                            \
  template Var<T> Mean(Var<T>, std::size_t);                              \
  template Var<T> Max(Var<T>, std::size_t);                               \
  template Var<T> Sum(Var<T>);                                            \
  template Var<T> Concat(std::span<const Var<T>>, std::size_t);           \
  template Var<T> Reshape(Var<T>, Shape);                                 \
  template Var<T> Slice(Var<T>, std::size_t, std::size_t, std::size_t);

MRRN_INSTANTIATE_AUTOGRAD(float)
MRRN_INSTANTIATE_AUTOGRAD(double)

#undef MRRN_INSTANTIATE_AUTOGRAD

}  // namespace mrrn
