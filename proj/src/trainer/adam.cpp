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

#include <cmath>

#include "mrrn/error.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn {

AdamState AdamState::For(const std::vector<std::string>& names,
                         const std::vector<const Tensor*>& shapes, double beta1,
                         double beta2, double epsilon) {
  if (names.size() != shapes.size()) {
    throw ValidationError("adam: " + std::to_string(names.size()) + " names for " +
                          std::to_string(shapes.size()) + " parameters");
  }
  AdamState s;
  s.names = names;
  for (const Tensor* t : shapes) {
    s.m.emplace_back(t->shape());
    s.v.emplace_back(t->shape());
  }
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

void AdamStep(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
              AdamState& state, double lr) {
  const std::size_t n = state.names.size();
  if (params.size() != n || grads.size() != n) {
    throw ValidationError("adam: state tracks " + std::to_string(n) + " parameters, got " +
                          std::to_string(params.size()) + " parameters and " +
                          std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (params[i]->shape() != grads[i]->shape() || params[i]->shape() != state.m[i].shape()) {
      throw ShapeError("adam: parameter '" + state.names[i] + "' " +
                       ShapeToString(params[i]->shape()) + " vs gradient " +
                       ShapeToString(grads[i]->shape()));
    }
    if (!grads[i]->AllFinite()) {
      throw NumericError("adam: non-finite gradient for parameter '" + state.names[i] + "'");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const float b1 = static_cast<float>(state.beta1), b2 = static_cast<float>(state.beta2);
  // 1 - beta in double: 1.f - 0.999f is off by 1e-5 relative.
  const float a1 = static_cast<float>(1.0 - state.beta1);
  const float a2 = static_cast<float>(1.0 - state.beta2);
  const float step = static_cast<float>(lr / c1);
  const float inv_sqrt_c2 = static_cast<float>(1.0 / std::sqrt(c2));
  const float eps = static_cast<float>(state.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    float* p = params[i]->data().data();
    const float* g = grads[i]->data().data();
    float* m = state.m[i].data().data();
    float* v = state.v[i].data().data();
    const std::size_t size = params[i]->size();
    for (std::size_t k = 0; k < size; ++k) {
      m[k] = b1 * m[k] + a1 * g[k];
      v[k] = b2 * v[k] + a2 * g[k] * g[k];
      p[k] -= step * m[k] / (std::sqrt(v[k]) * inv_sqrt_c2 + eps);
    }
  }
}

}  // namespace mrrn
