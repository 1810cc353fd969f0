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

// Vectorized elementwise kernels over contiguous buffers.

#ifndef MRRN_VMATH_HPP_
#define MRRN_VMATH_HPP_

#include <cstddef>

#include <Eigen/Core>

namespace mrrn::vmath {

template <typename T>
using ArrayMap = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using ConstArrayMap = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;

template <typename T>
void Tanh(const T* in, T* out, std::size_t n) {
  ArrayMap<T>(out, n) = ConstArrayMap<T>(in, n).tanh();
}

// Eigen's logistic saturates instead of overflowing for large |x|.
template <typename T>
void Sigmoid(const T* in, T* out, std::size_t n) {
  ArrayMap<T>(out, n) = ConstArrayMap<T>(in, n).logistic();
}

template <typename T>
void Exp(const T* in, T* out, std::size_t n) {
  ArrayMap<T>(out, n) = ConstArrayMap<T>(in, n).exp();
}

}  // namespace mrrn::vmath

#endif  // MRRN_VMATH_HPP_
