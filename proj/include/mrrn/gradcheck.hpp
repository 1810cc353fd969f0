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

#ifndef MRRN_GRADCHECK_HPP_
#define MRRN_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mrrn/autograd.hpp"

namespace mrrn {

// Builds a scalar loss from parameter leaves created by the checker.
using LossFn =
    std::function<Var<double>(Graph<double>&, std::span<const Var<double>>)>;

struct NamedTensorD {
  std::string name;
  TensorD value;
};

struct ParamGradCheck {
  std::string name;
  TensorD analytic;
  TensorD numeric;
  double max_rel_error = 0;
  bool pass = false;
};

struct GradReport {
  std::vector<ParamGradCheck> params;
  double max_rel_error = 0;
  bool pass = false;
};

inline constexpr double kRelErrorFloor = 1e-8;

// |a - n| / max(|a|, |n|, kRelErrorFloor)
double RelativeError(double analytic, double numeric);

// Compares reverse-mode gradients of `loss` against central differences
// (f(x + eps) - f(x - eps)) / 2eps, element by element, in double precision.
// eps must lie in [1e-5, 1e-2]. A failure inside `loss` at a perturbed point
// is rethrown with the parameter name, element index and perturbation sign.
GradReport GradientCheck(const LossFn& loss, std::span<const NamedTensorD> params,
                         double eps, double tol);

}  // namespace mrrn

#endif  // MRRN_GRADCHECK_HPP_
