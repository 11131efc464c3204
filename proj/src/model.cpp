/* Copyright 2026 The seofp Authors. All Rights Reserved.

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

#include "seofp/model.hpp"

#include <stdexcept>

#include "seofp/bitcore.hpp"

namespace seofp {

std::size_t LayerSpec::weight_count() const noexcept {
  return static_cast<std::size_t>(inputs) * static_cast<std::size_t>(outputs) * static_cast<std::size_t>(kernel);
}

std::size_t LayerSpec::fan_in() const noexcept {
  return static_cast<std::size_t>(inputs) * static_cast<std::size_t>(kernel);
}

void validate(const LayerSpec& spec) {
  if (spec.inputs <= 0 || spec.outputs <= 0 || spec.kernel <= 0) {
    throw std::invalid_argument("layer dimensions must be positive: " + describe(spec));
  }
  if (spec.kind == LayerKind::dense && spec.kernel != 1) {
    throw std::invalid_argument("dense layers have kernel length 1: " + describe(spec));
  }
}

std::size_t Model::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const Layer& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

Model make_zero_model(const std::vector<LayerSpec>& specs) {
  Model model;
  model.layers.reserve(specs.size());
  int channels = -1;  // channel count of the previous layer's output, -1 before the first layer
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& spec = specs[i];
    validate(spec);
    if (spec.kind == LayerKind::conv1d && channels > 0 && spec.inputs != channels) {
      throw std::invalid_argument("layer " + std::to_string(i) + " expects " + std::to_string(spec.inputs) +
                                  " channels but receives " + std::to_string(channels));
    }
    channels = spec.kind == LayerKind::dense ? 1 : spec.outputs;
    Layer layer;
    layer.spec = spec;
    layer.weights.assign(spec.weight_count(), 0.0f);
    layer.bias.assign(spec.bias_count(), 0.0f);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

std::vector<std::uint32_t> parameter_words(const Model& model) {
  std::vector<std::uint32_t> words;
  words.reserve(model.parameter_count());
  model.for_each_parameter([&](float v) { words.push_back(to_word(v)); });
  return words;
}

bool words_identical(const Model& a, const Model& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const Layer& la = a.layers[i];
    const Layer& lb = b.layers[i];
    if (!(la.spec == lb.spec) || to_word(la.sigma) != to_word(lb.sigma)) return false;
  }
  return parameter_words(a) == parameter_words(b);
}

std::string describe(const LayerSpec& spec) {
  std::string s = spec.kind == LayerKind::dense
                      ? "dense(" + std::to_string(spec.inputs) + "->" + std::to_string(spec.outputs) + ")"
                      : "conv1d(" + std::to_string(spec.inputs) + "->" + std::to_string(spec.outputs) + ", k=" +
                            std::to_string(spec.kernel) + ")";
  if (spec.activation == Activation::clamp) s += "+clamp";
  return s;
}

}  // namespace seofp
