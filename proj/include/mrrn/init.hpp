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

#ifndef MRRN_INIT_HPP_
#define MRRN_INIT_HPP_

#include <cstdint>

#include "mrrn/tensor.hpp"

namespace mrrn {

// Orthogonalized Gaussian matrix: QᵀQ = I when cols <= rows, QQᵀ = I
// otherwise. Bit-identical for a given (rows, cols, seed).
TensorD OrthogonalInitD(std::size_t rows, std::size_t cols, std::uint64_t seed);
Tensor OrthogonalInit(std::size_t rows, std::size_t cols, std::uint64_t seed);

// Max |G - I| where G is QᵀQ or QQᵀ, whichever is square of the smaller side.
double OrthogonalityResidual(const TensorD& q);

// Uniform(-bound, bound) entries.
Tensor UniformInit(const Shape& shape, float bound, std::uint64_t seed);

// Derives an independent stream seed from a base seed and a tag.
// splitmix64 finalizer over the combined words.
constexpr std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mrrn

#endif  // MRRN_INIT_HPP_
