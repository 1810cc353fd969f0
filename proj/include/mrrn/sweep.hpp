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

// Grids of training runs scored on a held-out split.

#ifndef MRRN_SWEEP_HPP_
#define MRRN_SWEEP_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrrn/trainer.hpp"

namespace mrrn {

struct SweepRow {
  std::size_t hidden = 0;
  std::size_t layers = 0;
  Level level = Level::kHigh;
  Pooling pool = Pooling::kMean;
  std::optional<double> accuracy;  // empty when the run failed
  std::string error;
};

inline const std::vector<std::size_t> kSweepHidden = {256, 512, 1024};
inline const std::vector<std::size_t> kSweepLayers = {3, 4, 5};

using SweepProgress = std::function<void(const SweepRow&)>;

// hidden x layers on one level; a failing run is recorded and the rest go on.
std::vector<SweepRow> SweepCapacity(const TrainConfig& base, const LoadedSplit& train,
                                    const LoadedSplit& test,
                                    const std::vector<std::size_t>& hidden = kSweepHidden,
                                    const std::vector<std::size_t>& layers = kSweepLayers,
                                    const SweepProgress& progress = {});

struct LevelData {
  LoadedSplit train;
  LoadedSplit test;
};

// level x {mean, max} at the base capacity.
std::vector<SweepRow> SweepPooling(const TrainConfig& base,
                                   const std::map<Level, LevelData>& data,
                                   const SweepProgress& progress = {});

// "hidden,layers,accuracy"; failed runs print "nan".
std::string CapacityCsv(const std::vector<SweepRow>& rows);
// "level,pool,accuracy".
std::string PoolingCsv(const std::vector<SweepRow>& rows);
// One "<row>: <message>" line per failed run.
std::string SweepErrors(const std::vector<SweepRow>& rows);

}  // namespace mrrn

#endif  // MRRN_SWEEP_HPP_
