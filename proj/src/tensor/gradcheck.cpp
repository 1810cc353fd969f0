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

#include "mrrn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mrrn {

double RelativeError(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

double Evaluate(const LossFn& loss, const std::vector<TensorD>& values,
                std::span<const NamedTensorD> params) {
  Graph<double> graph;
  std::vector<Var<double>> leaves;
  leaves.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    leaves.push_back(graph.Parameter(values[i], params[i].name));
  }
  return loss(graph, leaves).value().item();
}

}  // namespace

GradReport GradientCheck(const LossFn& loss, std::span<const NamedTensorD> params,
                         double eps, double tol) {
  if (!(eps >= 1e-5 && eps <= 1e-2)) {
    throw ValidationError("gradient_check: eps " + std::to_string(eps) +
                          " outside [1e-5, 1e-2]");
  }

  GradReport report;
  Gradients<double> analytic;
  {
    Graph<double> graph;
    std::vector<Var<double>> leaves;
    for (const auto& p : params) {
      leaves.push_back(graph.Parameter(p.value, p.name));
    }
    analytic = graph.Backward(loss(graph, leaves));
  }

  std::vector<TensorD> values;
  for (const auto& p : params) values.push_back(p.value);

  report.pass = true;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    ParamGradCheck check;
    check.name = params[pi].name;
    check.analytic = analytic.entries()[pi].grad;
    check.numeric = TensorD(params[pi].value.shape());
    for (std::size_t e = 0; e < values[pi].size(); ++e) {
      const double original = values[pi][e];
      double f[2];
      for (int side = 0; side < 2; ++side) {
        values[pi][e] = original + (side == 0 ? eps : -eps);
        try {
          f[side] = Evaluate(loss, values, params);
        } catch (const Error& err) {
          throw Error("gradient_check: loss failed with parameter '" +
                      check.name + "' element " + std::to_string(e) +
                      " perturbed by " + (side == 0 ? "+" : "-") +
                      std::to_string(eps) + ": " + err.what());
        }
      }
      values[pi][e] = original;
      check.numeric[e] = (f[0] - f[1]) / (2 * eps);
      check.max_rel_error =
          std::max(check.max_rel_error,
                   RelativeError(check.analytic[e], check.numeric[e]));
    }
    check.pass = check.max_rel_error <= tol;
    report.pass = report.pass && check.pass;
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace mrrn
