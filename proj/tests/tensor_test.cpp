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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mrrn/autograd.hpp"
#include "mrrn/error.hpp"
#include "mrrn/gradcheck.hpp"
#include "mrrn/init.hpp"
#include "mrrn/linalg.hpp"

namespace mrrn {
namespace {

TensorD RandD(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  TensorD t(std::move(shape));
  for (double& v : t.data()) v = n(rng);
  return t;
}

TEST(Tensor, RejectsLengthMismatchAndZeroExtent) {
  EXPECT_THROW(Tensor({2, 2}, {1.f, 2.f, 3.f}), ShapeError);
  EXPECT_THROW(Tensor(Shape{2, 0}), ShapeError);
}

TEST(Primitive, ScalarMatMul) {
  Graph<float> g;
  auto c = MatMul(g.Constant(Tensor::FromList({1, 1}, {2.f})),
                  g.Constant(Tensor::FromList({1, 1}, {3.f})));
  EXPECT_EQ(c.value().item(), 6.f);
}

TEST(Primitive, SigmoidOfZero) {
  Graph<float> g;
  EXPECT_FLOAT_EQ(Sigmoid(g.Constant(Tensor::Scalar(0.f))).value().item(), 0.5f);
}

TEST(Primitive, MeanOverAxis) {
  Graph<float> g;
  auto m = Mean(g.Constant(Tensor::FromList({3}, {1.f, 2.f, 3.f})), 0);
  EXPECT_FLOAT_EQ(m.value().item(), 2.f);
}

TEST(Primitive, MatMulShapeErrorNamesBothShapes) {
  Graph<float> g;
  try {
    MatMul(g.Constant(Tensor({2, 3})), g.Constant(Tensor({4, 5})));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[2, 3]"), std::string::npos) << what;
    EXPECT_NE(what.find("[4, 5]"), std::string::npos) << what;
  }
}

TEST(Primitive, AddShapeMismatchRejected) {
  Graph<float> g;
  EXPECT_THROW(Add(g.Constant(Tensor({2, 3})), g.Constant(Tensor({3, 2}))), ShapeError);
}

TEST(Primitive, NonFiniteOutputRejected) {
  Graph<float> g;
  EXPECT_THROW(Log(g.Constant(Tensor::Scalar(0.f))), NumericError);
  EXPECT_THROW(Exp(g.Constant(Tensor::Scalar(1000.f))), NumericError);
}

TEST(Primitive, BatchedMatMulTreatsLeadingAxesAsRows) {
  Graph<double> g;
  TensorD a = RandD({3, 2, 4}, 1), b = RandD({4, 5}, 2);
  auto c = MatMul(g.Constant(a), g.Constant(b));
  ASSERT_EQ(c.shape(), (Shape{3, 2, 5}));
  auto flat = MatMul(g.Constant(a.Reshaped({6, 4})), g.Constant(b));
  for (std::size_t i = 0; i < 30; ++i) EXPECT_DOUBLE_EQ(c.value()[i], flat.value()[i]);
}

TEST(Primitive, ConcatAndSlice) {
  Graph<float> g;
  auto a = g.Constant(Tensor::FromList({2, 1}, {1, 2}));
  auto b = g.Constant(Tensor::FromList({2, 2}, {3, 4, 5, 6}));
  std::vector<Var<float>> parts = {a, b};
  auto c = Concat<float>(parts, 1);
  EXPECT_EQ(c.value(), Tensor::FromList({2, 3}, {1, 3, 4, 2, 5, 6}));
  EXPECT_EQ(Slice(c, 1, 1, 3).value(), b.value());
}

TEST(Primitive, MaxOverAxis) {
  Graph<float> g;
  auto m = Max(g.Constant(Tensor::FromList({2, 2}, {1, 5, 4, 2})), 0);
  EXPECT_EQ(m.value(), Tensor::FromList({2}, {4, 5}));
}

TEST(Backward, SquareAtThree) {
  Graph<double> g;
  auto x = g.Parameter(TensorD::Scalar(3.0), "x");
  auto grads = g.Backward(Mul(x, x));
  EXPECT_DOUBLE_EQ(grads["x"].item(), 6.0);
}

TEST(Backward, SigmoidAtZero) {
  Graph<double> g;
  auto x = g.Parameter(TensorD::Scalar(0.0), "x");
  EXPECT_DOUBLE_EQ(g.Backward(Sigmoid(x))[x].item(), 0.25);
}

TEST(Backward, UnreachableLeafGetsZeros) {
  Graph<double> g;
  auto x = g.Parameter(TensorD::Scalar(2.0), "x");
  auto y = g.Parameter(TensorD({2, 2}), "y");
  auto grads = g.Backward(Mul(x, x));
  EXPECT_EQ(grads[y], TensorD({2, 2}));
}

TEST(Backward, NonScalarLossRejected) {
  Graph<double> g;
  auto x = g.Parameter(TensorD({2}), "x");
  EXPECT_THROW(g.Backward(x), ValidationError);
}

TEST(Backward, LinearInTheLoss) {
  TensorD a = RandD({3, 4}, 3), w = RandD({4, 2}, 4);
  auto grad_of = [&](int which) {
    Graph<double> g;
    auto x = g.Parameter(a, "x");
    auto wv = g.Parameter(w, "w");
    auto l1 = Sum(Tanh(MatMul(x, wv)));
    auto l2 = Sum(Mul(Sigmoid(x), x));
    auto loss = which == 0 ? l1 : which == 1 ? l2 : Add(l1, l2);
    return g.Backward(loss)["x"];
  };
  const TensorD g1 = grad_of(0), g2 = grad_of(1), g12 = grad_of(2);
  for (std::size_t i = 0; i < g12.size(); ++i) EXPECT_NEAR(g12[i], g1[i] + g2[i], 1e-12);
}

// Each primitive on its own, randomized shapes up to 8x8x8.
class PrimitiveGradient : public ::testing::TestWithParam<int> {};

TEST_P(PrimitiveGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(100 + GetParam());
  auto d = [&] { return std::uniform_int_distribution<std::size_t>(1, 8)(rng); };
  const std::size_t a0 = d(), a1 = d(), a2 = d();
  auto project = [&](Graph<double>& g, Var<double> v) {
    return Sum(Mul(v, g.Constant(RandD(v.shape(), 77))));
  };
  struct Op {
    const char* name;
    std::vector<NamedTensorD> params;
    LossFn loss;
  };
  const TensorD x = RandD({a0, a1, a2}, rng()), y = RandD({a0, a1, a2}, rng());
  TensorD pos = x;
  for (double& v : pos.data()) v = std::abs(v) + 0.5;
  std::vector<Op> ops;
  ops.push_back({"matmul", {{"a", RandD({a0, a1, a2}, rng())}, {"b", RandD({a2, d()}, rng())}},
                 [&](Graph<double>& g, auto l) { return project(g, MatMul(l[0], l[1])); }});
  ops.push_back({"add", {{"a", x}, {"b", y}},
                 [&](Graph<double>& g, auto l) { return project(g, Add(l[0], l[1])); }});
  ops.push_back({"sub", {{"a", x}, {"b", y}},
                 [&](Graph<double>& g, auto l) { return project(g, Sub(l[0], l[1])); }});
  ops.push_back({"mul", {{"a", x}, {"b", y}},
                 [&](Graph<double>& g, auto l) { return project(g, Mul(l[0], l[1])); }});
  ops.push_back({"add_row", {{"a", x}, {"v", RandD({a2}, rng())}},
                 [&](Graph<double>& g, auto l) { return project(g, AddRowVector(l[0], l[1])); }});
  ops.push_back({"sigmoid", {{"a", x}},
                 [&](Graph<double>& g, auto l) { return project(g, Sigmoid(l[0])); }});
  ops.push_back({"tanh", {{"a", x}},
                 [&](Graph<double>& g, auto l) { return project(g, Tanh(l[0])); }});
  ops.push_back({"exp", {{"a", x}},
                 [&](Graph<double>& g, auto l) { return project(g, Exp(l[0])); }});
  ops.push_back({"log", {{"a", pos}},
                 [&](Graph<double>& g, auto l) { return project(g, Log(l[0])); }});
  for (std::size_t axis = 0; axis < 3; ++axis) {
    ops.push_back({"mean", {{"a", x}}, [&, axis](Graph<double>& g, auto l) {
                     return project(g, Mean(l[0], axis));
                   }});
  }
  ops.push_back({"concat", {{"a", x}, {"b", y}}, [&](Graph<double>& g, auto l) {
                   std::vector<Var<double>> parts = {l[0], l[1]};
                   return project(g, Concat<double>(parts, 2));
                 }});
  ops.push_back({"slice", {{"a", x}}, [&](Graph<double>& g, auto l) {
                   return project(g, Slice(l[0], 2, 0, (a2 + 1) / 2));
                 }});
  ops.push_back({"reshape", {{"a", x}}, [&](Graph<double>& g, auto l) {
                   return project(g, Reshape(l[0], {a0 * a1, a2}));
                 }});
  for (const auto& op : ops) {
    const GradReport r = GradientCheck(op.loss, op.params, 1e-3, 1e-4);
    EXPECT_TRUE(r.pass) << op.name << " max rel error " << r.max_rel_error;
  }
}

INSTANTIATE_TEST_SUITE_P(Random, PrimitiveGradient, ::testing::Range(0, 5));

TEST(Backward, MaxRoutesGradientToArgmax) {
  Graph<double> g;
  auto x = g.Parameter(TensorD::FromList({3, 2}, {1, 9, 7, 2, 3, 4}), "x");
  auto grads = g.Backward(Sum(Max(x, 0)));
  EXPECT_EQ(grads[x], TensorD::FromList({3, 2}, {0, 1, 1, 0, 0, 0}));
}

TEST(GradCheck, SquareAtThree) {
  LossFn f = [](Graph<double>&, std::span<const Var<double>> l) { return Mul(l[0], l[0]); };
  std::vector<NamedTensorD> p = {{"x", TensorD::Scalar(3.0)}};
  const GradReport r = GradientCheck(f, p, 1e-3, 1e-4);
  ASSERT_TRUE(r.pass);
  EXPECT_DOUBLE_EQ(r.params[0].analytic.item(), 6.0);
  EXPECT_NEAR(r.params[0].numeric.item(), 6.0, 1e-5);
}

TEST(GradCheck, RejectsEpsOutsideRange) {
  LossFn f = [](Graph<double>&, std::span<const Var<double>> l) { return Mul(l[0], l[0]); };
  std::vector<NamedTensorD> p = {{"x", TensorD::Scalar(1.0)}};
  EXPECT_THROW(GradientCheck(f, p, 1e-6, 1e-4), ValidationError);
  EXPECT_THROW(GradientCheck(f, p, 0.1, 1e-4), ValidationError);
}

TEST(GradCheck, DetectsWrongGradient) {
  // Forward is x^2 but the custom backward claims 3x.
  LossFn f = [](Graph<double>& g, std::span<const Var<double>> l) {
    TensorD v = TensorD::Scalar(l[0].value().item() * l[0].value().item());
    return g.Record(Primitive::kCustom, "bad_square", v, {l[0]},
                    [](const TensorD& go, BackwardContext<double>& ctx) {
                      ctx.grad(0)[0] += go.item() * 3 * ctx.input(0).item();
                    });
  };
  std::vector<NamedTensorD> p = {{"x", TensorD::Scalar(2.0)}};
  EXPECT_FALSE(GradientCheck(f, p, 1e-3, 1e-4).pass);
}

TEST(GradCheck, FailureAtPerturbedPointNamesSite) {
  LossFn f = [](Graph<double>&, std::span<const Var<double>> l) { return Log(l[0]); };
  std::vector<NamedTensorD> p = {{"theta", TensorD::Scalar(5e-4)}};
  try {
    GradientCheck(f, p, 1e-3, 1e-4);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos) << e.what();
  }
}

TEST(GradCheck, RelativeErrorFloor) {
  EXPECT_DOUBLE_EQ(RelativeError(0, 0), 0);
  EXPECT_DOUBLE_EQ(RelativeError(1e-10, 0), 1e-10 / kRelErrorFloor);
  EXPECT_DOUBLE_EQ(RelativeError(2, 1), 0.5);
}

TEST(OrthogonalInit, OneByOneIsPlusMinusOne) {
  EXPECT_DOUBLE_EQ(std::abs(OrthogonalInitD(1, 1, 3).item()), 1.0);
}

TEST(OrthogonalInit, ResidualBoundOnManyShapes) {
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{4, 4}, {7, 3}, {3, 7}, {64, 64},
                      {128, 32}, {16, 100}}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      EXPECT_LT(OrthogonalityResidual(OrthogonalInitD(r, c, seed)), 1e-5)
          << r << "x" << c << " seed " << seed;
    }
  }
}

TEST(OrthogonalInit, SinglePrecisionIsOrthogonalToo) {
  Tensor q = OrthogonalInit(96, 48, 9);
  EXPECT_LT(OrthogonalityResidual(q.Cast<double>()), 1e-5);
}

TEST(OrthogonalInit, DeterministicPerSeed) {
  EXPECT_EQ(OrthogonalInit(1024, 512, 42), OrthogonalInit(1024, 512, 42));
  EXPECT_NE(OrthogonalInit(8, 8, 1), OrthogonalInit(8, 8, 2));
}

TEST(OrthogonalInit, RejectsZeroDims) {
  EXPECT_THROW(OrthogonalInitD(0, 3, 1), ValidationError);
}

TEST(Gemm, AccumulatesNaiveProductInAllTransposeModes) {
  for (bool ta : {false, true}) {
    for (bool tb : {false, true}) {
      const std::size_t m = 5, k = 7, n = 3;
      TensorD a = RandD(ta ? Shape{k, m} : Shape{m, k}, 11);
      TensorD b = RandD(tb ? Shape{n, k} : Shape{k, n}, 12);
      std::vector<double> c(m * n, 0.5);
      linalg::Gemm(ta, tb, m, n, k, a.data().data(), b.data().data(), c.data(), true);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0;
          for (std::size_t p = 0; p < k; ++p) {
            s += (ta ? a.at(p, i) : a.at(i, p)) * (tb ? b.at(j, p) : b.at(p, j));
          }
          EXPECT_NEAR(c[i * n + j], s + 0.5, 1e-12);
        }
      }
    }
  }
}

}  // namespace
}  // namespace mrrn
