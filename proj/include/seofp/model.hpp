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

#ifndef SEOFP_MODEL_HPP_
#define SEOFP_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace seofp {

enum class LayerKind : std::uint8_t { dense = 0, conv1d = 1 };

/// identity, or clamp(z, -1, 1).
enum class Activation : std::uint8_t { identity = 0, clamp = 1 };

/// Shape of one layer.
///
/// dense:  `inputs` x `outputs` weights (row-major, one row per output unit), flattening
///         whatever it receives into a single-channel vector of `outputs` samples.
/// conv1d: `outputs` filters of `kernel` taps over `inputs` channels, zero padded so the
///         output length equals the input length. Weights are [filter][channel][tap].
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  int inputs = 1;
  int outputs = 1;
  int kernel = 1;
  Activation activation = Activation::identity;

  static LayerSpec dense(int inputs, int outputs, Activation act = Activation::identity) {
    return {LayerKind::dense, inputs, outputs, 1, act};
  }
  static LayerSpec conv1d(int channels, int filters, int kernel, Activation act = Activation::identity) {
    return {LayerKind::conv1d, channels, filters, kernel, act};
  }

  std::size_t weight_count() const noexcept;
  std::size_t bias_count() const noexcept { return static_cast<std::size_t>(outputs); }
  /// Number of multiplies feeding each output sample.
  std::size_t fan_in() const noexcept;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Throws std::invalid_argument on non-positive dimensions.
void validate(const LayerSpec& spec);

struct Layer {
  LayerSpec spec;
  std::vector<float> weights;
  std::vector<float> bias;
  /// Normalization scale the layer divides its input by. A positive power of two.
  float sigma = 1.0f;
};

/// Ordered layers. Parameter values are plain IEEE-754 words held as floats.
struct Model {
  std::vector<Layer> layers;

  std::size_t parameter_count() const noexcept;

  /// Visits every weight then every bias of each layer, in layer order.
  template <typename Fn>
  void for_each_parameter(Fn&& fn) const {
    for (const Layer& layer : layers) {
      for (float w : layer.weights) fn(w);
      for (float b : layer.bias) fn(b);
    }
  }
  template <typename Fn>
  void for_each_parameter(Fn&& fn) {
    for (Layer& layer : layers) {
      for (float& w : layer.weights) fn(w);
      for (float& b : layer.bias) fn(b);
    }
  }
};

/// Creates a model with zero parameters for the given layer chain. Checks that consecutive
/// conv1d layers agree on channel counts.
Model make_zero_model(const std::vector<LayerSpec>& specs);

/// Words of every parameter, in for_each_parameter order.
std::vector<std::uint32_t> parameter_words(const Model& model);

/// True when both models have the same layer specs, sigmas and parameter words.
bool words_identical(const Model& a, const Model& b);

std::string describe(const LayerSpec& spec);

}  // namespace seofp

#endif  // SEOFP_MODEL_HPP_
