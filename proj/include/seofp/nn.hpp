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

#ifndef SEOFP_NN_HPP_
#define SEOFP_NN_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "seofp/arith.hpp"
#include "seofp/model.hpp"
#include "seofp/quant.hpp"

namespace seofp {

/// Activations laid out [channel][sample].
struct Signal {
  int channels = 1;
  int length = 0;
  std::vector<float> data;

  Signal() = default;
  Signal(int channels, int length, float fill = 0.0f);
  static Signal from(std::vector<float> samples);  // single channel

  float& at(int c, int t) { return data[static_cast<std::size_t>(c) * length + t]; }
  float at(int c, int t) const { return data[static_cast<std::size_t>(c) * length + t]; }
  std::size_t size() const noexcept { return data.size(); }
};

/// Signal produced by a layer for an input of the given shape. Throws std::invalid_argument on
/// a shape mismatch.
Signal output_shape(const LayerSpec& spec, const Signal& input);

/// Throws std::invalid_argument unless every sigma is a positive power of two within 2^[-63, 63].
void validate_sigmas(const Model& model);

int sigma_log2(float sigma);

/// Native single-precision forward pass. Each layer divides its input by sigma, then computes
/// act(W x + b) with left-to-right accumulation.
Signal forward(const Model& model, const Signal& input);

struct LayerGradients {
  std::vector<float> weights;
  std::vector<float> bias;
};

struct Gradients {
  std::vector<LayerGradients> layers;
  float loss = 0.0f;  // mean squared error over the batch
};

/// Mean over elements of (prediction - target)^2.
float mse(const Signal& prediction, const Signal& target);

/// Gradients of the batch-mean MSE with respect to every weight and bias.
Gradients backward(const Model& model, std::span<const Signal> inputs, std::span<const Signal> targets);

struct TrainConfig {
  int bits = 32;  // retained bit-width of every parameter
  float learning_rate = 0.05f;
  int epochs = 20;
  int batch_size = 16;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument / std::out_of_range for unusable settings.
  void validate() const;
};

/// Uniform [-0.5, 0.5] weights scaled by 1/sqrt(fan_in), zero biases, then fraction quantized.
Model init_model(const std::vector<LayerSpec>& specs, std::uint64_t seed, QuantSpec spec);

/// SGD update from precomputed gradients: update, clamp to [-1, 1], flush subnormal results to
/// +0, fraction quantize. Throws std::runtime_error when grads.loss is not finite.
Model apply_update(const Model& model, const Gradients& grads, const TrainConfig& config);

/// One SGD step: update, clamp to [-1, 1], flush subnormal results to +0, fraction quantize.
/// Throws std::runtime_error when the loss is not finite.
Model train_step(const Model& model, std::span<const Signal> inputs, std::span<const Signal> targets,
                 const TrainConfig& config);

struct TrainResult {
  Model model;
  std::vector<float> epoch_loss;  // mean pre-update batch loss per epoch
};

/// Runs config.epochs passes over the examples in a seeded shuffled order.
TrainResult train(Model model, std::span<const Signal> inputs, std::span<const Signal> targets,
                  const TrainConfig& config);

struct InferenceLayer {
  LayerSpec spec;
  std::vector<AdjustedParam> weights;
  std::vector<float> bias;
  float sigma = 1.0f;
  float sigma_adjusted = 0.0f;  // sigma * 2^64
};

/// Trained model rewritten for multiplier-free inference. Immutable once built.
struct InferenceModel {
  std::vector<InferenceLayer> layers;
  FlushStats build_flushes;  // parameters flushed to +0 while adjusting
};

/// Adjusts every weight by 2^-63 and every sigma by 2^64. Biases are added rather than
/// multiplied and keep their value. Rejects parameters with nonzero fractions.
InferenceModel build_inference_model(const Model& model);

/// Inference where every multiply is one integer addition. Each layer input is normalized and
/// adjusted by a single exponent subtract derived from sigma_adjusted.
Signal infer(const InferenceModel& model, const Signal& input, FlushStats* stats = nullptr);

/// Same layer schedule with products from reference_product. Used as an oracle.
Signal infer_reference(const Model& model, const Signal& input, FlushStats* stats = nullptr);

}  // namespace seofp

#endif  // SEOFP_NN_HPP_
