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

#ifndef MRRN_LINALG_HPP_
#define MRRN_LINALG_HPP_

#include <cstddef>
#include <string>

namespace mrrn::linalg {

// C[m,n] (+)= op(A)[m,k] * op(B)[k,n] over row-major buffers. When trans_a is
// set, A is stored as [k,m]; likewise B as [n,k] when trans_b is set.
template <typename T>
void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, const T* a, const T* b, T* c, bool accumulate);

// "openblas" or "eigen". Setting MRRN_BLAS=eigen forces the latter.
std::string BackendName();

}  // namespace mrrn::linalg

#endif  // MRRN_LINALG_HPP_
