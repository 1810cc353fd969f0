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

// Randomized gradient checks over every parameterized operation.

#ifndef MRRN_GRADSUITE_HPP_
#define MRRN_GRADSUITE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mrrn/gradcheck.hpp"

namespace mrrn {

struct GradSuiteOptions {
  std::size_t trials = 3;  // per operation
  std::size_t max_dim = 8;
  std::size_t max_steps = 6;
  double eps = 1e-3;
  double tol = 1e-4;
  std::uint64_t seed = 7;
};

struct GradCase {
  std::string op;
  std::size_t trial = 0;
  std::string dims;  // e.g. "T=4 B=2 in=3 hidden=5"
  GradReport report;
};

// Ops: sru_cell, sru_layer, sru_stack, sru_stack_dropout, lstm, head_mean,
// head_max, cross_entropy.
std::vector<GradCase> RunGradSuite(const GradSuiteOptions& options);

inline constexpr const char* kGradSuiteHeader = "op,trial,dims,param,max_rel_error,pass";
std::string GradSuiteCsv(const std::vector<GradCase>& cases);

}  // namespace mrrn

#endif  // MRRN_GRADSUITE_HPP_
