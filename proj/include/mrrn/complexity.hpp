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

// Multiply-accumulate and parameter counts of convolutional backbones with
// optional recurrent heads. Biases are never counted.
//
//   time  = sum_l M_l^2 * K_l^2 * C_in * C_out
//   space = sum_l K_l^2 * C_in * C_out
//
// A recurrent layer contributes its weight-matrix element count to space and
// that count times the sequence length to time (one MAC per weight per step).
//
// Architecture file, one layer per line, '#' starts a comment:
//   conv M K C_in C_out [xRepeat]
//   rnn TYPE input hidden layers seqlen      (TYPE: sru | lstm)

#ifndef MRRN_COMPLEXITY_HPP_
#define MRRN_COMPLEXITY_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mrrn/bench.hpp"

namespace mrrn {

using u128 = unsigned __int128;

std::string ToString(u128 value);

struct ConvLayerSpec {
  std::uint64_t m = 1;       // output feature-map side
  std::uint64_t k = 1;       // kernel side
  std::uint64_t c_in = 1;
  std::uint64_t c_out = 1;
  std::uint64_t repeat = 1;

  void Validate() const;
};

struct RecurrentLayerSpec {
  CellKind cell = CellKind::kSru;
  std::uint64_t input = 1;
  std::uint64_t hidden = 1;
  std::uint64_t layers = 1;
  std::uint64_t seqlen = 1;

  void Validate() const;
};

struct ArchDescription {
  std::string name;
  std::vector<ConvLayerSpec> convs;
  std::vector<RecurrentLayerSpec> recurrent;

  void Validate() const;  // at least one layer
};

// Both throw ValidationError if a count would not fit in 128 bits.
u128 TimeComplexity(const ArchDescription& arch);
u128 SpaceComplexity(const ArchDescription& arch);

u128 ConvTime(const ConvLayerSpec& layer);
u128 ConvSpace(const ConvLayerSpec& layer);
// Weight elements of the stack: SRU 3 matrices per layer (4 when the input
// width differs from the hidden width), LSTM 4 input and 4 recurrent.
u128 RecurrentSpace(const RecurrentLayerSpec& layer);
u128 RecurrentTime(const RecurrentLayerSpec& layer);

// Layers of `a` followed by those of `b`.
ArchDescription ConcatArch(const ArchDescription& a, const ArchDescription& b,
                           std::string name);

// `source` names the text in error messages ("file:line: ...").
ArchDescription ParseArch(const std::string& text, const std::string& name,
                          const std::string& source);
// Name is the file stem.
ArchDescription LoadArch(const std::filesystem::path& path);

inline constexpr const char* kComplexityHeader = "name,time_macs,space_params";
std::string ComplexityReport(std::span<const ArchDescription> archs);

}  // namespace mrrn

#endif  // MRRN_COMPLEXITY_HPP_
