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

#include "mrrn/sweep.hpp"

#include <fmt/format.h>

#include "mrrn/error.hpp"

namespace mrrn {

namespace {

void RunInto(SweepRow& row, const TrainConfig& config, const LoadedSplit& train,
             const LoadedSplit& test) {
  try {
    TrainState state = InitTrainState(config, train.dim(), train.classes.size());
    Train(state, train, nullptr);
    row.accuracy = Evaluate(state.model, test, config.clips).accuracy;
  } catch (const std::exception& e) {
    row.accuracy.reset();
    row.error = e.what();
  }
}

std::string Accuracy(const SweepRow& r) {
  return r.accuracy ? fmt::format("{}", *r.accuracy) : "nan";
}

}  // namespace

std::vector<SweepRow> SweepCapacity(const TrainConfig& base, const LoadedSplit& train,
                                    const LoadedSplit& test,
                                    const std::vector<std::size_t>& hidden,
                                    const std::vector<std::size_t>& layers,
                                    const SweepProgress& progress) {
  std::vector<SweepRow> rows;
  for (std::size_t h : hidden) {
    for (std::size_t l : layers) {
      SweepRow row;
      row.hidden = h;
      row.layers = l;
      row.level = base.level;
      row.pool = base.pool;
      TrainConfig c = base;
      c.hidden = h;
      c.layers = l;
      RunInto(row, c, train, test);
      if (progress) progress(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> SweepPooling(const TrainConfig& base,
                                   const std::map<Level, LevelData>& data,
                                   const SweepProgress& progress) {
  std::vector<SweepRow> rows;
  for (const auto& [level, d] : data) {
    for (Pooling pool : {Pooling::kMean, Pooling::kMax}) {
      SweepRow row;
      row.hidden = base.hidden;
      row.layers = base.layers;
      row.level = level;
      row.pool = pool;
      TrainConfig c = base;
      c.level = level;
      c.pool = pool;
      RunInto(row, c, d.train, d.test);
      if (progress) progress(row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string CapacityCsv(const std::vector<SweepRow>& rows) {
  std::string out = "hidden,layers,accuracy\n";
  for (const auto& r : rows) out += fmt::format("{},{},{}\n", r.hidden, r.layers, Accuracy(r));
  return out;
}

std::string PoolingCsv(const std::vector<SweepRow>& rows) {
  std::string out = "level,pool,accuracy\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{}\n", LevelName(r.level), PoolingName(r.pool), Accuracy(r));
  }
  return out;
}

std::string SweepErrors(const std::vector<SweepRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    if (r.accuracy) continue;
    out += fmt::format("hidden={} layers={} level={} pool={}: {}\n", r.hidden, r.layers,
                       LevelName(r.level), PoolingName(r.pool), r.error);
  }
  return out;
}

}  // namespace mrrn
