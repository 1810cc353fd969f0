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

#include "mrrn/gradsuite.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "mrrn/error.hpp"
#include "mrrn/head.hpp"
#include "mrrn/init.hpp"
#include "mrrn/lstm.hpp"
#include "mrrn/sru.hpp"

namespace mrrn {

namespace {

using Leaves = std::span<const Var<double>>;

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  std::size_t Dim(std::size_t max) {
    return std::uniform_int_distribution<std::size_t>(1, max)(rng_);
  }
  TensorD Normal(Shape shape, double scale = 1.0) {
    TensorD t(std::move(shape));
    std::normal_distribution<double> n(0.0, scale);
    for (double& v : t.data()) v = n(rng_);
    return t;
  }
  std::uint64_t Seed() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

// Scalar loss sum(a * probe) with a fixed random probe, so that every
// output element carries a distinct weight.
Var<double> Project(Graph<double>& g, Var<double> a, Draw& draw) {
  return Sum(Mul(a, g.Constant(draw.Normal(a.shape()))));
}

void AddSru(std::vector<NamedTensorD>& params, std::size_t in, std::size_t hidden,
            Draw& draw, const std::string& prefix) {
  const double s = 1.0 / std::sqrt(static_cast<double>(in));
  params.push_back({prefix + ".W", draw.Normal({in, hidden}, s)});
  params.push_back({prefix + ".W_f", draw.Normal({in, hidden}, s)});
  params.push_back({prefix + ".W_r", draw.Normal({in, hidden}, s)});
  params.push_back({prefix + ".b_f", draw.Normal({hidden}, 0.5)});
  params.push_back({prefix + ".b_r", draw.Normal({hidden}, 0.5)});
  if (in != hidden) params.push_back({prefix + ".W_h", draw.Normal({in, hidden}, s)});
}

// Leaves [at, ...) laid out by AddSru.
SruLayerVars<double> SruAt(Leaves leaves, std::size_t& at, bool highway) {
  SruLayerVars<double> v{leaves[at], leaves[at + 1], leaves[at + 2], leaves[at + 3],
                         leaves[at + 4], std::nullopt};
  at += 5;
  if (highway) v.w_h = leaves[at++];
  return v;
}

struct Case {
  std::string dims;
  std::vector<NamedTensorD> params;
  LossFn loss;
};

Case SruCell(Draw& d, const GradSuiteOptions& o) {
  const std::size_t b = d.Dim(o.max_dim), in = d.Dim(o.max_dim), h = d.Dim(o.max_dim);
  Case c;
  c.dims = fmt::format("B={} in={} hidden={}", b, in, h);
  c.params.push_back({"x", d.Normal({b, in})});
  c.params.push_back({"c_prev", d.Normal({b, h})});
  AddSru(c.params, in, h, d, "sru");
  const std::uint64_t probe = d.Seed();
  c.loss = [in, h, probe](Graph<double>& g, Leaves l) {
    Draw pd(probe);
    std::size_t at = 2;
    const auto p = SruAt(l, at, in != h);
    const auto out = SruCellStep(l[0], l[1], p);
    return Add(Project(g, out.h, pd), Project(g, out.c, pd));
  };
  return c;
}

Case SruLayer(Draw& d, const GradSuiteOptions& o) {
  const std::size_t t = d.Dim(o.max_steps), b = d.Dim(o.max_dim);
  const std::size_t in = d.Dim(o.max_dim), h = d.Dim(o.max_dim);
  Case c;
  c.dims = fmt::format("T={} B={} in={} hidden={}", t, b, in, h);
  c.params.push_back({"x", d.Normal({t, b, in})});
  AddSru(c.params, in, h, d, "sru");
  const std::uint64_t probe = d.Seed();
  c.loss = [in, h, probe](Graph<double>& g, Leaves l) {
    Draw pd(probe);
    std::size_t at = 1;
    return Project(g, SruLayerForward(l[0], SruAt(l, at, in != h)), pd);
  };
  return c;
}

Case SruStack(Draw& d, const GradSuiteOptions& o, bool dropout) {
  const std::size_t t = d.Dim(o.max_steps), b = d.Dim(o.max_dim);
  StackConfig cfg;
  cfg.input = d.Dim(o.max_dim);
  cfg.hidden = d.Dim(o.max_dim);
  cfg.layers = d.Dim(3);
  cfg.dropout = dropout ? 0.3 : 0.0;
  Case c;
  c.dims = fmt::format("T={} B={} in={} hidden={} layers={}", t, b, cfg.input,
                       cfg.hidden, cfg.layers);
  c.params.push_back({"x", d.Normal({t, b, cfg.input})});
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    AddSru(c.params, k == 0 ? cfg.input : cfg.hidden, cfg.hidden, d,
           "layer" + std::to_string(k));
  }
  const std::uint64_t probe = d.Seed(), mask = d.Seed();
  c.loss = [cfg, probe, mask, dropout](Graph<double>& g, Leaves l) {
    Draw pd(probe);
    std::vector<SruLayerVars<double>> layers;
    std::size_t at = 1;
    for (std::size_t k = 0; k < cfg.layers; ++k) {
      layers.push_back(SruAt(l, at, k == 0 && cfg.input != cfg.hidden));
    }
    return Project(g, StackForward<double>(l[0], cfg, layers, dropout, mask), pd);
  };
  return c;
}

Case Lstm(Draw& d, const GradSuiteOptions& o) {
  const std::size_t t = d.Dim(o.max_steps), b = d.Dim(o.max_dim);
  const std::size_t in = d.Dim(o.max_dim), h = d.Dim(o.max_dim);
  Case c;
  c.dims = fmt::format("T={} B={} in={} hidden={}", t, b, in, h);
  c.params.push_back({"x", d.Normal({t, b, in})});
  static constexpr const char* kGate[] = {"i", "f", "o", "g"};
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    c.params.push_back({fmt::format("lstm.W_x{}", kGate[k]),
                        d.Normal({in, h}, 1.0 / std::sqrt(double(in)))});
  }
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    c.params.push_back({fmt::format("lstm.W_h{}", kGate[k]),
                        d.Normal({h, h}, 1.0 / std::sqrt(double(h)))});
  }
  for (std::size_t k = 0; k < kLstmGates; ++k) {
    c.params.push_back({fmt::format("lstm.b_{}", kGate[k]), d.Normal({h}, 0.5)});
  }
  const std::uint64_t probe = d.Seed();
  c.loss = [probe](Graph<double>& g, Leaves l) {
    Draw pd(probe);
    LstmVars<double> v{{l[1], l[2], l[3], l[4]}, {l[5], l[6], l[7], l[8]},
                       {l[9], l[10], l[11], l[12]}};
    return Project(g, LstmLayerForward(l[0], v), pd);
  };
  return c;
}

std::vector<std::size_t> Labels(Draw& d, std::size_t b, std::size_t classes) {
  std::vector<std::size_t> labels(b);
  for (auto& y : labels) y = d.Dim(classes) - 1;
  return labels;
}

// Max pooling is piecewise; redraw until every per-step maximum leads the
// runner-up by more than the perturbation can close.
bool MaxMarginOk(const TensorD& r, const TensorD& w, const TensorD& b, double eps) {
  const std::size_t t = r.dim(0), batch = r.dim(1), hid = r.dim(2), cls = w.dim(1);
  // Perturbing one entry of r, W or b moves a logit by at most eps * bound.
  double bound = 1.0;
  for (double v : r.data()) bound = std::max(bound, std::abs(v));
  for (double v : w.data()) bound = std::max(bound, std::abs(v));
  for (std::size_t bi = 0; bi < batch; ++bi) {
    for (std::size_t j = 0; j < cls; ++j) {
      std::vector<double> z(t);
      for (std::size_t ti = 0; ti < t; ++ti) {
        double s = b[j];
        for (std::size_t k = 0; k < hid; ++k) s += r[(ti * batch + bi) * hid + k] * w[k * cls + j];
        z[ti] = s;
      }
      std::sort(z.begin(), z.end());
      if (t > 1 && z[t - 1] - z[t - 2] <= 4 * eps * bound) return false;
    }
  }
  return true;
}

Case Head(Draw& d, const GradSuiteOptions& o, Pooling pool) {
  Case c;
  for (;;) {
    const std::size_t t = d.Dim(o.max_steps), b = d.Dim(o.max_dim);
    const std::size_t h = d.Dim(o.max_dim), k = d.Dim(o.max_dim - 1) + 1;
    c.dims = fmt::format("T={} B={} hidden={} classes={}", t, b, h, k);
    c.params.clear();
    c.params.push_back({"r", d.Normal({t, b, h})});
    c.params.push_back({"cls.W", d.Normal({h, k})});
    c.params.push_back({"cls.b", d.Normal({k}, 0.5)});
    auto labels = Labels(d, b, k);
    c.loss = [pool, labels](Graph<double>&, Leaves l) {
      ClassifierVars<double> p{l[1], l[2]};
      return SoftmaxCrossEntropy(PooledLogits(l[0], p, pool), labels);
    };
    if (pool == Pooling::kMean ||
        MaxMarginOk(c.params[0].value, c.params[1].value, c.params[2].value, o.eps)) {
      return c;
    }
  }
}

Case CrossEntropyCase(Draw& d, const GradSuiteOptions& o) {
  const std::size_t b = d.Dim(o.max_dim), k = d.Dim(o.max_dim - 1) + 1;
  Case c;
  c.dims = fmt::format("B={} classes={}", b, k);
  c.params.push_back({"logits", d.Normal({b, k}, 2.0)});
  auto labels = Labels(d, b, k);
  c.loss = [labels](Graph<double>&, Leaves l) { return SoftmaxCrossEntropy(l[0], labels); };
  return c;
}

}  // namespace

std::vector<GradCase> RunGradSuite(const GradSuiteOptions& o) {
  if (o.max_dim < 2 || o.max_steps < 1 || o.trials < 1) {
    throw ValidationError("gradient suite needs max_dim >= 2, max_steps >= 1, trials >= 1");
  }
  using Maker = std::function<Case(Draw&)>;
  const std::vector<std::pair<std::string, Maker>> ops = {
      {"sru_cell", [&](Draw& d) { return SruCell(d, o); }},
      {"sru_layer", [&](Draw& d) { return SruLayer(d, o); }},
      {"sru_stack", [&](Draw& d) { return SruStack(d, o, false); }},
      {"sru_stack_dropout", [&](Draw& d) { return SruStack(d, o, true); }},
      {"lstm", [&](Draw& d) { return Lstm(d, o); }},
      {"head_mean", [&](Draw& d) { return Head(d, o, Pooling::kMean); }},
      {"head_max", [&](Draw& d) { return Head(d, o, Pooling::kMax); }},
      {"cross_entropy", [&](Draw& d) { return CrossEntropyCase(d, o); }},
  };
  std::vector<GradCase> out;
  for (std::size_t oi = 0; oi < ops.size(); ++oi) {
    for (std::size_t trial = 0; trial < o.trials; ++trial) {
      Draw draw(MixSeed(MixSeed(o.seed, oi), trial));
      Case c = ops[oi].second(draw);
      GradCase g;
      g.op = ops[oi].first;
      g.trial = trial;
      g.dims = c.dims;
      g.report = GradientCheck(c.loss, c.params, o.eps, o.tol);
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::string GradSuiteCsv(const std::vector<GradCase>& cases) {
  std::string out = std::string(kGradSuiteHeader) + "\n";
  for (const auto& c : cases) {
    for (const auto& p : c.report.params) {
      out += fmt::format("{},{},{},{},{:.3e},{}\n", c.op, c.trial, c.dims, p.name,
                         p.max_rel_error, p.pass ? 1 : 0);
    }
  }
  return out;
}

}  // namespace mrrn
