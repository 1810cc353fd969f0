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

#include "mrrn/error.hpp"
#include "mrrn/init.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn {

namespace {

constexpr std::uint64_t kStackTag = 1;
constexpr std::uint64_t kHeadTag = 2;
constexpr std::uint64_t kHeadDropoutTag = 0xd20;

}  // namespace

Model Model::Init(const TrainConfig& config, std::size_t input_dim,
                  std::size_t num_classes, std::uint64_t seed) {
  Model m;
  m.stack = {config.layers, config.hidden, input_dim, config.dropout};
  m.stack.Validate();
  m.layers = InitSruStack<float>(m.stack, MixSeed(seed, kStackTag));
  m.head = ClassifierParams<float>::Init(config.hidden, num_classes,
                                         MixSeed(seed, kHeadTag));
  m.pool = config.pool;
  return m;
}

std::vector<std::pair<std::string, Tensor*>> Model::NamedParams() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const std::string p = "layer" + std::to_string(k);
    auto& l = layers[k];
    out.emplace_back(p + ".W", &l.w);
    out.emplace_back(p + ".W_f", &l.w_f);
    out.emplace_back(p + ".W_r", &l.w_r);
    out.emplace_back(p + ".b_f", &l.b_f);
    out.emplace_back(p + ".b_r", &l.b_r);
    if (l.w_h) out.emplace_back(p + ".W_h", &*l.w_h);
  }
  out.emplace_back("cls.W", &head.w);
  if (head.b) out.emplace_back("cls.b", &*head.b);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> Model::NamedParams() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<Model*>(this)->NamedParams()) {
    out.emplace_back(name, t);
  }
  return out;
}

Var<float> ModelLogits(Graph<float>& graph, const Model& model, const Tensor& x,
                       bool train_mode, std::uint64_t seed, bool trainable) {
  std::vector<SruLayerVars<float>> vars;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    vars.push_back(trainable
                       ? BindSruLayer(graph, model.layers[k], "layer" + std::to_string(k))
                       : BindSruLayerConstant(graph, model.layers[k]));
  }
  ClassifierVars<float> head;
  if (trainable) {
    head = BindClassifier(graph, model.head, "cls");
  } else {
    head.w = graph.Constant(model.head.w);
    if (model.head.b) head.b = graph.Constant(*model.head.b);
  }
  Var<float> r = StackForward<float>(graph.Constant(x), model.stack, vars,
                                     train_mode, seed);
  if (train_mode) r = Dropout(r, model.stack.dropout, MixSeed(seed, kHeadDropoutTag));
  return PooledLogits(r, head, model.pool);
}

}  // namespace mrrn
