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

#include "mrrn/checkpoint.hpp"

#include <cstring>
#include <map>
#include <sstream>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"

namespace mrrn {

namespace {

constexpr char kMagic[8] = {'M', 'R', 'R', 'N', 'C', 'K', 'P', 'T'};

void PutTensor(ByteWriter& w, const Tensor& t) {
  w.U32(static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) w.U64(d);
  for (float v : t.data()) w.F32(v);
}

Tensor GetTensor(ByteReader& r) {
  const std::size_t at = r.offset();
  const std::uint32_t rank = r.U32();
  if (rank > 8) r.FailAt(at, "implausible tensor rank " + std::to_string(rank));
  Shape shape(rank);
  std::size_t size = 1;
  for (auto& d : shape) {
    d = r.U64();
    if (d == 0) r.FailAt(at, "zero tensor extent");
    if (d > r.remaining() || size > r.remaining() / d) {
      r.FailAt(at, "tensor extents exceed the file length");
    }
    size *= d;
  }
  Tensor t(shape);
  r.F32Array(t.data());
  return t;
}

// Structure-only model for the loaded config; values are filled in later.
Model EmptyModel(const TrainConfig& c, std::size_t input_dim, std::size_t classes) {
  Model m;
  m.stack = {c.layers, c.hidden, input_dim, c.dropout};
  m.stack.Validate();
  for (std::size_t k = 0; k < c.layers; ++k) {
    m.layers.push_back(SruLayerParams<float>::Zeros(k == 0 ? input_dim : c.hidden, c.hidden));
  }
  m.head.w = Tensor({c.hidden, classes});
  m.head.b = Tensor({classes});
  m.pool = c.pool;
  return m;
}

}  // namespace

std::vector<std::uint8_t> EncodeCheckpoint(const TrainState& s) {
  ByteWriter w;
  for (char c : kMagic) w.U8(static_cast<std::uint8_t>(c));
  w.U32(kCheckpointVersion);
  w.Str(s.config.Serialize());
  w.U32(static_cast<std::uint32_t>(s.model.num_classes()));
  w.U32(static_cast<std::uint32_t>(s.model.stack.input));
  w.U64(s.epoch);
  std::ostringstream rng;
  rng << s.rng;
  w.Str(rng.str());
  const auto params = s.model.NamedParams();
  w.U32(static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    w.Str(name);
    PutTensor(w, *t);
  }
  w.U64(s.adam.step);
  w.F64(s.adam.beta1);
  w.F64(s.adam.beta2);
  w.F64(s.adam.epsilon);
  w.U32(static_cast<std::uint32_t>(s.adam.names.size()));
  for (std::size_t i = 0; i < s.adam.names.size(); ++i) {
    w.Str(s.adam.names[i]);
    PutTensor(w, s.adam.m[i]);
    PutTensor(w, s.adam.v[i]);
  }
  w.U32(static_cast<std::uint32_t>(s.history.size()));
  for (const auto& h : s.history) {
    w.U64(h.epoch);
    w.Str(h.split);
    w.F64(h.loss);
    w.F64(h.accuracy);
    w.F64(h.lr);
  }
  return w.Take();
}

TrainState DecodeCheckpoint(std::span<const std::uint8_t> bytes, const std::string& source) {
  ByteReader r(bytes, source);
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    r.FailAt(0, "not a checkpoint (bad magic)");
  }
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) r.U8();
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    r.FailAt(8, "unsupported checkpoint version " + std::to_string(version) +
                    " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
  }
  TrainState s;
  std::size_t at = r.offset();
  try {
    s.config = TrainConfig::Deserialize(r.Str());
  } catch (const ValidationError& e) {
    r.FailAt(at, std::string("bad config block: ") + e.what());
  }
  const std::uint32_t classes = r.U32();
  const std::uint32_t input_dim = r.U32();
  if (classes < 2 || input_dim == 0) r.Fail("bad model dimensions");
  s.epoch = r.U64();
  at = r.offset();
  {
    std::istringstream in(r.Str());
    in >> s.rng;
    if (!in) r.FailAt(at, "bad RNG state");
  }
  s.model = EmptyModel(s.config, input_dim, classes);
  std::map<std::string, Tensor*> slots;
  for (auto& [name, t] : s.model.NamedParams()) slots[name] = t;
  at = r.offset();
  const std::uint32_t count = r.U32();
  if (count != slots.size()) {
    r.FailAt(at, "expected " + std::to_string(slots.size()) + " tensors, found " +
                     std::to_string(count));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    at = r.offset();
    const std::string name = r.Str();
    auto it = slots.find(name);
    if (it == slots.end()) r.FailAt(at, "unexpected tensor '" + name + "'");
    Tensor t = GetTensor(r);
    if (t.shape() != it->second->shape()) {
      r.FailAt(at, "tensor '" + name + "' is " + ShapeToString(t.shape()) + ", expected " +
                       ShapeToString(it->second->shape()));
    }
    *it->second = std::move(t);
    slots.erase(it);
  }
  s.adam.step = r.U64();
  s.adam.beta1 = r.F64();
  s.adam.beta2 = r.F64();
  s.adam.epsilon = r.F64();
  at = r.offset();
  const std::uint32_t moments = r.U32();
  if (moments != count) r.FailAt(at, "optimizer state covers " + std::to_string(moments) +
                                         " of " + std::to_string(count) + " tensors");
  const auto params = std::as_const(s.model).NamedParams();
  for (std::uint32_t i = 0; i < moments; ++i) {
    at = r.offset();
    std::string name = r.Str();
    if (name != params[i].first) {
      r.FailAt(at, "optimizer entry '" + name + "' where '" + params[i].first + "' belongs");
    }
    Tensor m = GetTensor(r);
    Tensor v = GetTensor(r);
    if (m.shape() != params[i].second->shape() || v.shape() != m.shape()) {
      r.FailAt(at, "optimizer moments for '" + name + "' have the wrong shape");
    }
    s.adam.names.push_back(std::move(name));
    s.adam.m.push_back(std::move(m));
    s.adam.v.push_back(std::move(v));
  }
  const std::uint32_t rows = r.U32();
  for (std::uint32_t i = 0; i < rows; ++i) {
    HistoryRow h;
    h.epoch = r.U64();
    h.split = r.Str();
    h.loss = r.F64();
    h.accuracy = r.F64();
    h.lr = r.F64();
    s.history.push_back(std::move(h));
  }
  if (r.remaining() != 0) r.Fail("trailing bytes after the checkpoint");
  return s;
}

void SaveCheckpoint(const std::filesystem::path& path, const TrainState& state) {
  WriteFileAtomic(path, EncodeCheckpoint(state));
}

TrainState LoadCheckpoint(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return DecodeCheckpoint(bytes, path.string());
}

}  // namespace mrrn
