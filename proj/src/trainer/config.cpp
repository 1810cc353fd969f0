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

#include <fmt/format.h>

#include <charconv>
#include <map>
#include <sstream>

#include "mrrn/error.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn {

namespace {

template <typename N>
N ParseNumber(const std::string& key, const std::string& text) {
  N value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

void TrainConfig::Validate() const {
  auto positive = [](const char* name, std::size_t v) {
    if (v == 0) throw ValidationError(std::string(name) + " must be >= 1");
  };
  positive("layers", layers);
  positive("hidden", hidden);
  positive("epochs", epochs);
  positive("batch", batch);
  if (!(lr1 > 0) || !(lr2 > 0)) throw ValidationError("learning rates must be > 0");
  if (lr2 > lr1) throw ValidationError("lr2 must not exceed lr1");
  if (!(dropout >= 0 && dropout < 1)) throw ValidationError("dropout must be in [0, 1)");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw ValidationError("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0)) throw ValidationError("Adam epsilon must be > 0");
  fusion.Validate();
  clips.Validate();
}

std::string TrainConfig::Serialize() const {
  std::string out;
  auto put = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  put("level", LevelName(level));
  put("layers", layers);
  put("hidden", hidden);
  put("pool", PoolingName(pool));
  put("epochs", epochs);
  put("batch", batch);
  put("lr1", lr1);
  put("lr2", lr2);
  put("lr_drop_epoch", lr_drop_epoch);
  put("dropout", dropout);
  put("seed", seed);
  put("fusion", fmt::format("{},{},{}", fusion.high, fusion.mid, fusion.low));
  put("clip_len", clips.clip_len);
  put("stride", clips.stride);
  put("max_clips", clips.max_clips);
  put("beta1", beta1);
  put("beta2", beta2);
  put("epsilon", epsilon);
  return out;
}

TrainConfig TrainConfig::Deserialize(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  TrainConfig c;
  auto take = [&kv](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ValidationError("config is missing key '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto size = [&](const std::string& key) { return ParseNumber<std::size_t>(key, take(key)); };
  auto real = [&](const std::string& key) { return ParseNumber<double>(key, take(key)); };
  c.level = ParseLevel(take("level"));
  c.layers = size("layers");
  c.hidden = size("hidden");
  c.pool = ParsePooling(take("pool"));
  c.epochs = size("epochs");
  c.batch = size("batch");
  c.lr1 = real("lr1");
  c.lr2 = real("lr2");
  c.lr_drop_epoch = size("lr_drop_epoch");
  c.dropout = real("dropout");
  c.seed = ParseNumber<std::uint64_t>("seed", take("seed"));
  c.fusion = FusionWeights::Parse(take("fusion"));
  c.clips.clip_len = size("clip_len");
  c.clips.stride = size("stride");
  c.clips.max_clips = size("max_clips");
  c.beta1 = real("beta1");
  c.beta2 = real("beta2");
  c.epsilon = real("epsilon");
  if (!kv.empty()) throw ValidationError("unknown config key '" + kv.begin()->first + "'");
  c.Validate();
  return c;
}

double LrSchedule(const TrainConfig& config, std::size_t epoch) {
  if (epoch < 1) throw ValidationError("epochs are numbered from 1");
  return epoch <= config.lr_drop_epoch ? config.lr1 : config.lr2;
}

}  // namespace mrrn
