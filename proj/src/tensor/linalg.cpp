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

#include "mrrn/linalg.hpp"

#include <dlfcn.h>

#include <cstdlib>
#include <string>
#include <mutex>

#include <Eigen/Core>

namespace mrrn::linalg {

namespace {

// cblas enum values.
constexpr int kRowMajor = 101;
constexpr int kNoTrans = 111;
constexpr int kTrans = 112;

using SgemmFn = void (*)(int, int, int, int, int, int, float, const float*, int,
                         const float*, int, float, float*, int);
using DgemmFn = void (*)(int, int, int, int, int, int, double, const double*,
                         int, const double*, int, double, double*, int);

struct Blas {
  SgemmFn sgemm = nullptr;
  DgemmFn dgemm = nullptr;
  std::string name = "eigen";
};

// OpenBLAS picks its kernels from the CPU model, which virtual machines often
// hide; it then falls back to generic code. The core type is chosen from the
// feature flags instead, and must be in the environment before the library
// initializes, hence the dlopen.
const Blas& LoadBlas() {
  static Blas blas;
  static std::once_flag once;
  std::call_once(once, [] {
    const char* disable = std::getenv("MRRN_BLAS");
    if (disable && std::string(disable) == "eigen") return;
#ifdef MRRN_OPENBLAS_PATH
    if (!std::getenv("OPENBLAS_CORETYPE")) {
      __builtin_cpu_init();
      if (__builtin_cpu_supports("avx512f")) {
        setenv("OPENBLAS_CORETYPE", "SkylakeX", 0);
      } else if (__builtin_cpu_supports("avx2")) {
        setenv("OPENBLAS_CORETYPE", "Haswell", 0);
      }
    }
    void* handle = dlopen(MRRN_OPENBLAS_PATH, RTLD_NOW | RTLD_LOCAL);
    if (!handle) return;
    auto s = reinterpret_cast<SgemmFn>(dlsym(handle, "cblas_sgemm"));
    auto d = reinterpret_cast<DgemmFn>(dlsym(handle, "cblas_dgemm"));
    if (!s || !d) return;
    if (auto threads = reinterpret_cast<void (*)(int)>(
            dlsym(handle, "openblas_set_num_threads"))) {
      threads(1);
    }
    blas.sgemm = s;
    blas.dgemm = d;
    blas.name = "openblas";
#endif
  });
  return blas;
}

void Call(const Blas& blas, bool ta, bool tb, int m, int n, int k, const float* a,
          const float* b, float* c, bool acc) {
  blas.sgemm(kRowMajor, ta ? kTrans : kNoTrans, tb ? kTrans : kNoTrans, m, n, k,
             1.f, a, ta ? m : k, b, tb ? k : n, acc ? 1.f : 0.f, c, n);
}

void Call(const Blas& blas, bool ta, bool tb, int m, int n, int k, const double* a,
          const double* b, double* c, bool acc) {
  blas.dgemm(kRowMajor, ta ? kTrans : kNoTrans, tb ? kTrans : kNoTrans, m, n, k,
             1.0, a, ta ? m : k, b, tb ? k : n, acc ? 1.0 : 0.0, c, n);
}

template <typename T>
using RowMajor =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using ConstMap = Eigen::Map<const RowMajor<T>>;

template <typename T, typename L, typename R>
void Store(T* c, std::size_t m, std::size_t n, const L& lhs, const R& rhs,
           bool accumulate) {
  Eigen::Map<RowMajor<T>> out(c, m, n);
  if (accumulate) {
    out.noalias() += lhs * rhs;
  } else {
    out.noalias() = lhs * rhs;
  }
}

}  // namespace

template <typename T>
void Gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, const T* a, const T* b, T* c, bool accumulate) {
  if (m == 0 || n == 0) return;
  const Blas& blas = LoadBlas();
  if (blas.sgemm && k > 0) {
    Call(blas, trans_a, trans_b, static_cast<int>(m), static_cast<int>(n),
         static_cast<int>(k), a, b, c, accumulate);
    return;
  }
  const auto em = static_cast<Eigen::Index>(m);
  const auto en = static_cast<Eigen::Index>(n);
  const auto ek = static_cast<Eigen::Index>(k);
  if (!trans_a && !trans_b) {
    Store(c, m, n, ConstMap<T>(a, em, ek), ConstMap<T>(b, ek, en), accumulate);
  } else if (!trans_a && trans_b) {
    Store(c, m, n, ConstMap<T>(a, em, ek), ConstMap<T>(b, en, ek).transpose(),
          accumulate);
  } else if (trans_a && !trans_b) {
    Store(c, m, n, ConstMap<T>(a, ek, em).transpose(), ConstMap<T>(b, ek, en),
          accumulate);
  } else {
    Store(c, m, n, ConstMap<T>(a, ek, em).transpose(),
          ConstMap<T>(b, en, ek).transpose(), accumulate);
  }
}

std::string BackendName() { return LoadBlas().name; }

template void Gemm<float>(bool, bool, std::size_t, std::size_t, std::size_t,
                          const float*, const float*, float*, bool);
template void Gemm<double>(bool, bool, std::size_t, std::size_t, std::size_t,
                           const double*, const double*, double*, bool);

}  // namespace mrrn::linalg
