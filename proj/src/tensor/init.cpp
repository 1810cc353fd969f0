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

#include "mrrn/init.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <random>

namespace mrrn {

TensorD OrthogonalInitD(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) {
    throw ValidationError("orthogonal_init: dimensions must be >= 1, got " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  const auto tall = static_cast<Eigen::Index>(std::max(rows, cols));
  const auto narrow = static_cast<Eigen::Index>(std::min(rows, cols));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(tall, narrow);
  for (Eigen::Index j = 0; j < narrow; ++j) {
    for (Eigen::Index i = 0; i < tall; ++i) a(i, j) = normal(rng);
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(tall, narrow);
  // Sign fix makes the factorization unique (uniform over the orthogonal
  // group rather than biased by the Householder convention).
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < narrow; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }

  TensorD out({rows, cols});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out.at(i, j) = rows >= cols ? q(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(j))
                                  : q(static_cast<Eigen::Index>(j),
                                      static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

Tensor OrthogonalInit(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return OrthogonalInitD(rows, cols, seed).Cast<float>();
}

double OrthogonalityResidual(const TensorD& q) {
  if (q.rank() != 2) {
    throw ShapeError("orthogonality residual needs a matrix, got " +
                     ShapeToString(q.shape()));
  }
  const auto rows = static_cast<Eigen::Index>(q.dim(0));
  const auto cols = static_cast<Eigen::Index>(q.dim(1));
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      m(q.data().data(), rows, cols);
  const Eigen::MatrixXd gram = rows >= cols ? Eigen::MatrixXd(m.transpose() * m)
                                            : Eigen::MatrixXd(m * m.transpose());
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
      .cwiseAbs()
      .maxCoeff();
}

Tensor UniformInit(const Shape& shape, float bound, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uniform(-bound, bound);
  Tensor t(shape);
  for (float& v : t.data()) v = uniform(rng);
  return t;
}

}  // namespace mrrn
