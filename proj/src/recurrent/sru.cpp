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

#include "mrrn/sru.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "mrrn/init.hpp"
#include "mrrn/vmath.hpp"

namespace mrrn {

namespace {

void RequireShape(const char* what, const Shape& got, const Shape& want) {
  if (got != want) {
    throw ShapeError(std::string(what) + ": expected shape " +
                     ShapeToString(want) + ", got " + ShapeToString(got));
  }
}

}  // namespace

template <typename T>
void SruLayerParams<T>::Validate() const {
  if (w.rank() != 2) {
    throw ShapeError("SRU W must be a matrix, got " + ShapeToString(w.shape()));
  }
  const Shape mat = w.shape();
  RequireShape("SRU W_f", w_f.shape(), mat);
  RequireShape("SRU W_r", w_r.shape(), mat);
  RequireShape("SRU b_f", b_f.shape(), {mat[1]});
  RequireShape("SRU b_r", b_r.shape(), {mat[1]});
  if (mat[0] != mat[1]) {
    if (!w_h) {
      throw ShapeError("SRU layer " + ShapeToString(mat) +
                       " changes width and needs a highway projection W_h");
    }
    RequireShape("SRU W_h", w_h->shape(), mat);
  } else if (w_h) {
    throw ShapeError("SRU layer " + ShapeToString(mat) +
                     " keeps width; W_h must be absent");
  }
}

template <typename T>
SruLayerParams<T> SruLayerParams<T>::Orthogonal(std::size_t input,
                                                std::size_t hidden,
                                                std::uint64_t seed) {
  auto mat = [&](std::uint64_t tag) {
    return OrthogonalInitD(input, hidden, MixSeed(seed, tag)).Cast<T>();
  };
  SruLayerParams p{mat(0), mat(1), mat(2), BasicTensor<T>({hidden}),
                   BasicTensor<T>({hidden}), std::nullopt};
  if (input != hidden) p.w_h = mat(3);
  return p;
}

template <typename T>
SruLayerParams<T> SruLayerParams<T>::Zeros(std::size_t input,
                                           std::size_t hidden) {
  SruLayerParams p{BasicTensor<T>({input, hidden}),
                   BasicTensor<T>({input, hidden}),
                   BasicTensor<T>({input, hidden}),
                   BasicTensor<T>({hidden}),
                   BasicTensor<T>({hidden}),
                   std::nullopt};
  if (input != hidden) p.w_h = BasicTensor<T>({input, hidden});
  return p;
}

template <typename T>
SruLayerVars<T> BindSruLayer(Graph<T>& graph, const SruLayerParams<T>& p,
                             const std::string& prefix) {
  p.Validate();
  SruLayerVars<T> v{graph.Parameter(p.w, prefix + ".W"),
                    graph.Parameter(p.w_f, prefix + ".W_f"),
                    graph.Parameter(p.w_r, prefix + ".W_r"),
                    graph.Parameter(p.b_f, prefix + ".b_f"),
                    graph.Parameter(p.b_r, prefix + ".b_r"),
                    std::nullopt};
  if (p.w_h) v.w_h = graph.Parameter(*p.w_h, prefix + ".W_h");
  return v;
}

template <typename T>
SruLayerVars<T> BindSruLayerConstant(Graph<T>& graph,
                                     const SruLayerParams<T>& p) {
  p.Validate();
  SruLayerVars<T> v{graph.Constant(p.w),   graph.Constant(p.w_f),
                    graph.Constant(p.w_r), graph.Constant(p.b_f),
                    graph.Constant(p.b_r), std::nullopt};
  if (p.w_h) v.w_h = graph.Constant(*p.w_h);
  return v;
}

template <typename T>
SruStepOutput<T> SruCellStep(Var<T> x, Var<T> c_prev,
                             const SruLayerVars<T>& p) {
  if (x.shape().size() != 2 || x.shape()[1] != p.input_size()) {
    throw ShapeError("sru_cell_step: input " + ShapeToString(x.shape()) +
                     " does not match layer input size " +
                     std::to_string(p.input_size()));
  }
  RequireShape("sru_cell_step c_prev", c_prev.shape(),
               {x.shape()[0], p.hidden_size()});
  Var<T> x_tilde = MatMul(x, p.w);
  Var<T> f = Sigmoid(AddRowVector(MatMul(x, p.w_f), p.b_f));
  Var<T> r = Sigmoid(AddRowVector(MatMul(x, p.w_r), p.b_r));
  Var<T> c = Add(Mul(f, c_prev), Mul(Affine(f, T{-1}, T{1}), x_tilde));
  Var<T> highway = p.w_h ? MatMul(x, *p.w_h) : x;
  Var<T> h = Add(Mul(r, Tanh(c)), Mul(Affine(r, T{-1}, T{1}), highway));
  return {h, c};
}

template <typename T>
Var<T> SruScan(Var<T> x_tilde, Var<T> f, Var<T> r, Var<T> highway) {
  const Shape shape = x_tilde.shape();
  if (shape.size() != 3) {
    throw ShapeError("sru_scan: expected [T, B, hidden], got " +
                     ShapeToString(shape));
  }
  RequireShape("sru_scan f", f.shape(), shape);
  RequireShape("sru_scan r", r.shape(), shape);
  RequireShape("sru_scan highway", highway.shape(), shape);
  const std::size_t steps = shape[0];
  const std::size_t width = shape[1] * shape[2];

  const auto& xt = x_tilde.value();
  const auto& fv = f.value();
  const auto& rv = r.value();
  const auto& hw = highway.value();
  BasicTensor<T> h(shape);
  // tanh(c_t) is kept for backward alongside c_t.
  auto saved = std::make_shared<std::pair<BasicTensor<T>, BasicTensor<T>>>(
      BasicTensor<T>(shape), BasicTensor<T>(shape));
  auto& c = saved->first;
  auto& tc = saved->second;
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t base = t * width;
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t k = base + i;
      const T prev = t == 0 ? T{0} : c[k - width];
      c[k] = fv[k] * prev + (T{1} - fv[k]) * xt[k];
    }
    vmath::Tanh(&c[base], &tc[base], width);
    for (std::size_t i = 0; i < width; ++i) {
      const std::size_t k = base + i;
      h[k] = rv[k] * tc[k] + (T{1} - rv[k]) * hw[k];
    }
  }

  return x_tilde.graph()->Record(
      Primitive::kCustom, "sru_scan", std::move(h), {x_tilde, f, r, highway},
      [steps, width, saved](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        const auto& c = saved->first;
        const auto& tc = saved->second;
        const auto& xt = ctx.input(0);
        const auto& fv = ctx.input(1);
        const auto& rv = ctx.input(2);
        const auto& hw = ctx.input(3);
        T* dxt = ctx.needs_grad(0) ? ctx.grad(0).data().data() : nullptr;
        T* df = ctx.needs_grad(1) ? ctx.grad(1).data().data() : nullptr;
        T* dr = ctx.needs_grad(2) ? ctx.grad(2).data().data() : nullptr;
        T* dhw = ctx.needs_grad(3) ? ctx.grad(3).data().data() : nullptr;
        // dc carries dL/dc_{t} contributions from step t+1.
        std::vector<T> dc_next(width, T{0});
        for (std::size_t t = steps; t-- > 0;) {
          const std::size_t base = t * width;
          for (std::size_t i = 0; i < width; ++i) {
            const std::size_t k = base + i;
            const T gh = g[k];
            const T dc = gh * rv[k] * (T{1} - tc[k] * tc[k]) + dc_next[i];
            const T prev = t == 0 ? T{0} : c[k - width];
            if (dr) dr[k] += gh * (tc[k] - hw[k]);
            if (dhw) dhw[k] += gh * (T{1} - rv[k]);
            if (df) df[k] += dc * (prev - xt[k]);
            if (dxt) dxt[k] += dc * (T{1} - fv[k]);
            dc_next[i] = dc * fv[k];
          }
        }
      });
}

namespace {

// Gates and recurrence over one fused projection u = x [W | W_f | W_r (| W_h)]
// of shape [T, B, k * hidden]. Without W_h the highway term reads `x`.
template <typename T>
Var<T> SruFusedScan(Var<T> u, Var<T> b_f, Var<T> b_r, std::optional<Var<T>> x,
                    std::size_t hidden) {
  const Shape us = u.shape();
  const std::size_t steps = us[0], batch = us[1], width = us[2];
  const bool projected = !x.has_value();
  const std::size_t rows = steps * batch;
  const Shape out_shape{steps, batch, hidden};

  const T* uv = u.value().data().data();
  const T* bf = b_f.value().data().data();
  const T* br = b_r.value().data().data();
  const T* xv = projected ? nullptr : x->value().data().data();
  struct Saved {
    BasicTensor<T> f, r, c, tc;
  };
  auto saved = std::make_shared<Saved>(
      Saved{BasicTensor<T>(out_shape), BasicTensor<T>(out_shape),
            BasicTensor<T>(out_shape), BasicTensor<T>(out_shape)});
  T* f = saved->f.data().data();
  T* r = saved->r.data().data();
  T* c = saved->c.data().data();
  T* tc = saved->tc.data().data();
  BasicTensor<T> h(out_shape);
  T* hv = h.data().data();
  for (std::size_t row = 0; row < rows; ++row) {
    const T* ur = uv + row * width;
    T* fr = f + row * hidden;
    T* rr = r + row * hidden;
    for (std::size_t j = 0; j < hidden; ++j) {
      fr[j] = ur[hidden + j] + bf[j];
      rr[j] = ur[2 * hidden + j] + br[j];
    }
  }
  vmath::Sigmoid(f, f, rows * hidden);
  vmath::Sigmoid(r, r, rows * hidden);
  const std::size_t plane = batch * hidden;
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t row = t * batch + b;
      const T* xt = uv + row * width;
      const std::size_t o = row * hidden;
      for (std::size_t j = 0; j < hidden; ++j) {
        const T prev = t == 0 ? T{0} : c[o + j - plane];
        c[o + j] = f[o + j] * prev + (T{1} - f[o + j]) * xt[j];
      }
    }
    vmath::Tanh(c + t * plane, tc + t * plane, plane);
  }
  for (std::size_t row = 0; row < rows; ++row) {
    const T* hw = projected ? uv + row * width + 3 * hidden : xv + row * hidden;
    const std::size_t o = row * hidden;
    for (std::size_t j = 0; j < hidden; ++j) {
      hv[o + j] = r[o + j] * tc[o + j] + (T{1} - r[o + j]) * hw[j];
    }
  }

  std::vector<Var<T>> inputs{u, b_f, b_r};
  if (!projected) inputs.push_back(*x);
  return u.graph()->Record(
      Primitive::kCustom, "sru_fused_scan", std::move(h), std::move(inputs),
      [=](const BasicTensor<T>& g, BackwardContext<T>& ctx) {
        const T* gv = g.data().data();
        const T* f = saved->f.data().data();
        const T* r = saved->r.data().data();
        const T* c = saved->c.data().data();
        const T* tc = saved->tc.data().data();
        const T* uv = ctx.input(0).data().data();
        const T* xv = projected ? nullptr : ctx.input(3).data().data();
        std::vector<T> scratch;
        if (!ctx.needs_grad(0)) scratch.assign(rows * width, T{0});
        T* du = ctx.needs_grad(0) ? ctx.grad(0).data().data() : scratch.data();
        std::vector<T> dbf(hidden, T{0}), dbr(hidden, T{0}), dc(plane, T{0});
        T* dx = !projected && ctx.needs_grad(3) ? ctx.grad(3).data().data() : nullptr;
        for (std::size_t t = steps; t-- > 0;) {
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t row = t * batch + b;
            const std::size_t o = row * hidden;
            const T* ur = uv + row * width;
            const T* hw = projected ? ur + 3 * hidden : xv + o;
            T* dur = du + row * width;
            T* dcb = dc.data() + b * hidden;
            for (std::size_t j = 0; j < hidden; ++j) {
              const T gh = gv[o + j];
              const T fj = f[o + j], rj = r[o + j], tj = tc[o + j];
              const T d = gh * rj * (T{1} - tj * tj) + dcb[j];
              const T prev = t == 0 ? T{0} : c[o + j - plane];
              const T dfz = d * (prev - ur[j]) * fj * (T{1} - fj);
              const T drz = gh * (tj - hw[j]) * rj * (T{1} - rj);
              dur[j] += d * (T{1} - fj);
              dur[hidden + j] += dfz;
              dur[2 * hidden + j] += drz;
              dbf[j] += dfz;
              dbr[j] += drz;
              dcb[j] = d * fj;
            }
            if (projected) {
              for (std::size_t j = 0; j < hidden; ++j) {
                dur[3 * hidden + j] += gv[o + j] * (T{1} - r[o + j]);
              }
            } else if (dx) {
              for (std::size_t j = 0; j < hidden; ++j) {
                dx[o + j] += gv[o + j] * (T{1} - r[o + j]);
              }
            }
          }
        }
        if (ctx.needs_grad(1)) {
          auto& d = ctx.grad(1);
          for (std::size_t j = 0; j < hidden; ++j) d[j] += dbf[j];
        }
        if (ctx.needs_grad(2)) {
          auto& d = ctx.grad(2);
          for (std::size_t j = 0; j < hidden; ++j) d[j] += dbr[j];
        }
      });
}

}  // namespace

template <typename T>
Var<T> SruLayerForward(Var<T> x, const SruLayerVars<T>& p) {
  const Shape& xs = x.shape();
  if (xs.size() != 3 || xs[2] != p.input_size()) {
    throw ShapeError("sru_layer_forward: input " + ShapeToString(xs) +
                     " is not [T, B, " + std::to_string(p.input_size()) + "]");
  }
  const std::size_t hidden = p.hidden_size();

  // Phase 1: every projection for every time step in one product.
  std::vector<Var<T>> weights{p.w, p.w_f, p.w_r};
  if (p.w_h) weights.push_back(*p.w_h);
  const Var<T> packed = Concat<T>(weights, 1);
  const Var<T> u = MatMul(x, packed);

  // Phase 2: gates and the elementwise recurrence.
  return SruFusedScan(u, p.b_f, p.b_r,
                      p.w_h ? std::nullopt : std::optional<Var<T>>(x), hidden);
}

template <typename T>
Var<T> SruLayerForwardNaive(Var<T> x, const SruLayerVars<T>& p) {
  const Shape& xs = x.shape();
  if (xs.size() != 3 || xs[2] != p.input_size()) {
    throw ShapeError("sru_layer_forward: input " + ShapeToString(xs) +
                     " is not [T, B, " + std::to_string(p.input_size()) + "]");
  }
  const std::size_t steps = xs[0], batch = xs[1], hidden = p.hidden_size();
  Graph<T>& graph = *x.graph();
  Var<T> c = graph.Constant(BasicTensor<T>({batch, hidden}));
  std::vector<Var<T>> outputs;
  for (std::size_t t = 0; t < steps; ++t) {
    Var<T> xt = Reshape(Slice(x, 0, t, t + 1), {batch, xs[2]});
    SruStepOutput<T> step = SruCellStep(xt, c, p);
    c = step.c;
    outputs.push_back(Reshape(step.h, {1, batch, hidden}));
  }
  return Concat<T>(outputs, 0);
}

void StackConfig::Validate() const {
  if (layers < 1) throw ValidationError("stack: layers must be >= 1");
  if (hidden < 1) throw ValidationError("stack: hidden must be >= 1");
  if (input < 1) throw ValidationError("stack: input must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ValidationError("stack: dropout " + std::to_string(dropout) +
                          " outside [0, 1)");
  }
}

template <typename T>
std::vector<SruLayerParams<T>> InitSruStack(const StackConfig& cfg,
                                            std::uint64_t seed) {
  cfg.Validate();
  std::vector<SruLayerParams<T>> layers;
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    layers.push_back(SruLayerParams<T>::Orthogonal(
        k == 0 ? cfg.input : cfg.hidden, cfg.hidden, MixSeed(seed, k)));
  }
  return layers;
}

template <typename T>
Var<T> Dropout(Var<T> x, double p, std::uint64_t seed) {
  if (p <= 0.0) return x;
  const T scale = static_cast<T>(1.0 / (1.0 - p));
  // Counter-based: element pair i/2 draws from MixSeed(seed, i/2), two 32-bit
  // uniforms per 64-bit hash.
  const auto threshold = static_cast<std::uint64_t>((1.0 - p) * 4294967296.0);
  BasicTensor<T> mask(x.shape());
  auto m = mask.data();
  for (std::size_t i = 0; i < m.size(); i += 2) {
    const std::uint64_t bits = MixSeed(seed, i / 2);
    m[i] = (bits & 0xffffffffULL) < threshold ? scale : T{0};
    if (i + 1 < m.size()) m[i + 1] = (bits >> 32) < threshold ? scale : T{0};
  }
  return Mul(x, x.graph()->Constant(std::move(mask)));
}

template <typename T>
Var<T> StackForward(Var<T> x, const StackConfig& cfg,
                    std::span<const SruLayerVars<T>> layers, bool train_mode,
                    std::uint64_t seed) {
  cfg.Validate();
  if (layers.size() != cfg.layers) {
    throw ValidationError("stack: config declares " +
                          std::to_string(cfg.layers) + " layers, got " +
                          std::to_string(layers.size()));
  }
  if (x.shape().size() != 3 || x.shape()[2] != cfg.input) {
    throw ShapeError("stack: input " + ShapeToString(x.shape()) +
                     " is not [T, B, " + std::to_string(cfg.input) + "]");
  }
  Var<T> h = x;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::size_t want_in = k == 0 ? cfg.input : cfg.hidden;
    if (layers[k].input_size() != want_in ||
        layers[k].hidden_size() != cfg.hidden) {
      throw ShapeError("stack: layer " + std::to_string(k + 1) + " maps " +
                       std::to_string(layers[k].input_size()) + "->" +
                       std::to_string(layers[k].hidden_size()) +
                       ", chain requires " + std::to_string(want_in) + "->" +
                       std::to_string(cfg.hidden));
    }
    if (k > 0 && train_mode) h = Dropout(h, cfg.dropout, MixSeed(seed, k));
    Var<T> out = SruLayerForward(h, layers[k]);
    if (k > 0 && h.shape() == out.shape()) out = Add(out, h);
    h = out;
  }
  return Tanh(h);
}

#define MRRN_INSTANTIATE_SRU(T)                                              \
  template struct SruLayerParams<T>;                                         \
  template SruLayerVars<T> BindSruLayer(Graph<T>&, const SruLayerParams<T>&, \
                                        const std::string&);                 \
  template SruLayerVars<T> BindSruLayerConstant(Graph<T>&,                   \
                                                const SruLayerParams<T>&);   \
  template SruStepOutput<T> SruCellStep(Var<T>, Var<T>,                      \
                                        const SruLayerVars<T>&);             \
  template Var<T> SruScan(Var<T>, Var<T>, Var<T>, Var<T>);                   \
  template Var<T> SruLayerForward(Var<T>, const SruLayerVars<T>&);           \
  template Var<T> SruLayerForwardNaive(Var<T>, const SruLayerVars<T>&);      \
  template std::vector<SruLayerParams<T>> InitSruStack<T>(                   \
      const StackConfig&, std::uint64_t);                                    \
  template Var<T> Dropout(Var<T>, double, std::uint64_t);                    \
  template Var<T> StackForward(Var<T>, const StackConfig&,                   \
                               std::span<const SruLayerVars<T>>, bool,       \
                               std::uint64_t);

MRRN_INSTANTIATE_SRU(float)
MRRN_INSTANTIATE_SRU(double)

#undef MRRN_INSTANTIATE_SRU

}  // namespace mrrn
