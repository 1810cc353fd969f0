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

#include "mrrn/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>

#include "mrrn/init.hpp"
#include "mrrn/lstm.hpp"
#include "mrrn/sru.hpp"

namespace mrrn {

std::string_view CellKindName(CellKind kind) {
  return kind == CellKind::kSru ? "sru" : "lstm";
}

CellKind ParseCellKind(std::string_view name) {
  if (name == "sru") return CellKind::kSru;
  if (name == "lstm") return CellKind::kLstm;
  throw ValidationError("unknown cell '" + std::string(name) +
                        "' (expected sru or lstm)");
}

BenchResult ThroughputBench(const BenchConfig& cfg) {
  if (cfg.steps == 0 || cfg.batch == 0 || cfg.hidden == 0 || cfg.repeats == 0) {
    throw ValidationError("bench: T, batch, hidden and repeats must be >= 1");
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<float> normal(0.f, 1.f);
  Tensor input({cfg.steps, cfg.batch, cfg.hidden});
  for (float& v : input.data()) v = normal(rng);

  const auto sru = cfg.cell == CellKind::kSru
                       ? SruLayerParams<float>::Orthogonal(
                             cfg.hidden, cfg.hidden, MixSeed(cfg.seed, 1))
                       : SruLayerParams<float>{};
  const auto lstm = cfg.cell == CellKind::kLstm
                        ? LstmParams<float>::Orthogonal(cfg.hidden, cfg.hidden,
                                                        MixSeed(cfg.seed, 2))
                        : LstmParams<float>{};

  auto run_once = [&] {
    Graph<float> graph;
    Var<float> x = graph.Constant(input);
    if (cfg.cell == CellKind::kSru) {
      SruLayerForward(x, BindSruLayerConstant(graph, sru));
    } else {
      LstmLayerForward(x, BindLstmConstant(graph, lstm));
    }
  };

  for (std::size_t i = 0; i < cfg.warmup; ++i) run_once();

  BenchResult result{cfg.cell, cfg.steps, cfg.batch, cfg.hidden, 0, 0, {}};
  for (std::size_t i = 0; i < cfg.repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    run_once();
    const auto stop = std::chrono::steady_clock::now();
    result.samples_ms.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::vector<double> sorted = result.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  result.median_ms =
      n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  result.steps_per_s = static_cast<double>(cfg.steps * cfg.batch) /
                       (result.median_ms / 1000.0);
  return result;
}

std::string BenchCsvRow(const BenchResult& r) {
  return fmt::format("{},{},{},{},{:.6f},{:.3f}", CellKindName(r.cell), r.steps,
                     r.batch, r.hidden, r.median_ms, r.steps_per_s);
}

void AppendBenchCsv(const std::filesystem::path& path, const BenchResult& r) {
  const bool fresh =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open " + path.string() + " for append");
  if (fresh) out << kBenchCsvHeader << '\n';
  out << BenchCsvRow(r) << '\n';
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace mrrn
