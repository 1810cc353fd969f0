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

#ifndef MRRN_BENCH_HPP_
#define MRRN_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mrrn {

enum class CellKind { kSru, kLstm };

std::string_view CellKindName(CellKind kind);
CellKind ParseCellKind(std::string_view name);

struct BenchConfig {
  CellKind cell = CellKind::kSru;
  std::size_t steps = 30;  // T
  std::size_t batch = 28;
  std::size_t hidden = 1024;
  std::size_t repeats = 20;
  std::size_t warmup = 2;
  std::uint64_t seed = 0;
};

struct BenchResult {
  CellKind cell;
  std::size_t steps;
  std::size_t batch;
  std::size_t hidden;
  double median_ms;
  // Sequence elements (T * batch) processed per second at the median time.
  double steps_per_s;
  std::vector<double> samples_ms;
};

// Times one forward pass of a single layer (input size = hidden) over a
// random [T, batch, hidden] input. Warm-up iterations are discarded.
BenchResult ThroughputBench(const BenchConfig& cfg);

inline constexpr std::string_view kBenchCsvHeader =
    "cell,T,batch,hidden,median_ms,steps_per_s";

std::string BenchCsvRow(const BenchResult& r);

// Appends a row, writing the header first if the file is new or empty.
void AppendBenchCsv(const std::filesystem::path& path, const BenchResult& r);

}  // namespace mrrn

#endif  // MRRN_BENCH_HPP_
