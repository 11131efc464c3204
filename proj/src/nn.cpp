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

#include "seofp/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "seofp/bitcore.hpp"

namespace seofp {

namespace {

float activate(Activation act, float z) { return act == Activation::clamp ? std::clamp(z, -1.0f, 1.0f) : z; }

float activation_slope(Activation act, float z) {
  if (act == Activation::identity) return 1.0f;
  return (z > -1.0f && z < 1.0f) ? 1.0f : 0.0f;
}

int conv_left_pad(const LayerSpec& spec) { return (spec.kernel - 1) / 2; }

/// The one MAC schedule every backend shares: for each output sample, products accumulate
/// left to right from +0 over (channel, tap) or input index, then the bias is added.
template <typename In, typename W, typename Mul>
void run_layer(const LayerSpec& spec, std::span<const In> x, int length, std::span<const W> w,
               std::span<const float> bias, Mul&& mul, std::span<float> pre, std::span<float> out) {
  if (spec.kind == LayerKind::dense) {
    const std::size_t n_in = static_cast<std::size_t>(spec.inputs);
    for (int o = 0; o < spec.outputs; ++o) {
      const std::size_t row = static_cast<std::size_t>(o) * n_in;
      float acc = 0.0f;
      for (std::size_t i = 0; i < n_in; ++i) acc += mul(x[i], w[row + i]);
      acc += bias[o];
      if (!pre.empty()) pre[o] = acc;
      out[o] = activate(spec.activation, acc);
    }
    return;
  }
  const int pad = conv_left_pad(spec);
  const int channels = spec.inputs;
  const int taps = spec.kernel;
  for (int f = 0; f < spec.outputs; ++f) {
    for (int t = 0; t < length; ++t) {
      float acc = 0.0f;
      for (int c = 0; c < channels; ++c) {
        const std::size_t xrow = static_cast<std::size_t>(c) * length;
        const std::size_t wrow = (static_cast<std::size_t>(f) * channels + c) * taps;
        const int k_lo = std::max(0, pad - t);
        const int k_hi = std::min(taps, length + pad - t);
        for (int k = k_lo; k < k_hi; ++k) acc += mul(x[xrow + (t + k - pad)], w[wrow + k]);
      }
      acc += bias[f];
      const std::size_t idx = static_cast<std::size_t>(f) * length + t;
      if (!pre.empty()) pre[idx] = acc;
      out[idx] = activate(spec.activation, acc);
    }
  }
}

Signal normalize(const Signal& x, float sigma) {
  if (sigma == 1.0f) return x;
  Signal n = x;
  for (float& v : n.data) v /= sigma;
  return n;
}

struct Trace {
  std::vector<Signal> normalized;  // layer inputs after dividing by sigma
  std::vector<Signal> pre;         // pre-activation outputs
  Signal output;
};

Trace forward_trace(const Model& model, const Signal& input) {
  Trace trace;
  trace.normalized.reserve(model.layers.size());
  trace.pre.reserve(model.layers.size());
  Signal x = input;
  for (const Layer& layer : model.layers) {
    Signal n = normalize(x, layer.sigma);
    Signal y = output_shape(layer.spec, n);
    Signal z = y;
    run_layer<float, float>(layer.spec, std::span<const float>(n.data), n.length, std::span<const float>(layer.weights),
                            std::span<const float>(layer.bias), [](float a, float b) { return a * b; },
                            std::span<float>(z.data), std::span<float>(y.data));
    trace.normalized.push_back(std::move(n));
    trace.pre.push_back(std::move(z));
    x = std::move(y);
  }
  trace.output = std::move(x);
  return trace;
}

void require_same_shape(const Signal& a, const Signal& b, const char* what) {
  if (a.channels != b.channels || a.length != b.length) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" + std::to_string(a.channels) + "x" +
                                std::to_string(a.length) + " vs " + std::to_string(b.channels) + "x" +
                                std::to_string(b.length) + ")");
  }
}

}  // namespace

Signal::Signal(int channels_, int length_, float fill)
    : channels(channels_), length(length_), data(static_cast<std::size_t>(channels_) * length_, fill) {}

Signal Signal::from(std::vector<float> samples) {
  Signal s;
  s.channels = 1;
  s.length = static_cast<int>(samples.size());
  s.data = std::move(samples);
  return s;
}

Signal output_shape(const LayerSpec& spec, const Signal& input) {
  if (spec.kind == LayerKind::dense) {
    if (input.size() != static_cast<std::size_t>(spec.inputs)) {
      throw std::invalid_argument(describe(spec) + " received " + std::to_string(input.size()) + " values");
    }
    return Signal(1, spec.outputs);
  }
  if (input.channels != spec.inputs) {
    throw std::invalid_argument(describe(spec) + " received " + std::to_string(input.channels) + " channels");
  }
  return Signal(spec.outputs, input.length);
}

int sigma_log2(float sigma) { return unbiased_exponent(to_word(sigma)); }

void validate_sigmas(const Model& model) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const std::uint32_t w = to_word(model.layers[i].sigma);
    const bool power_of_two = classify(w) == WordClass::normal && (w & kFractionMask) == 0 && (w >> 31) == 0;
    if (!power_of_two || std::abs(unbiased_exponent(w)) > 63) {
      throw std::invalid_argument("layer " + std::to_string(i) + ": sigma must be a positive power of two in 2^[-63, 63]");
    }
  }
}

Signal forward(const Model& model, const Signal& input) { return forward_trace(model, input).output; }

float mse(const Signal& prediction, const Signal& target) {
  require_same_shape(prediction, target, "mse");
  if (prediction.data.empty()) return 0.0f;
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.data.size(); ++i) {
    const double d = static_cast<double>(prediction.data[i]) - target.data[i];
    sum += d * d;
  }
  return static_cast<float>(sum / static_cast<double>(prediction.data.size()));
}

Gradients backward(const Model& model, std::span<const Signal> inputs, std::span<const Signal> targets) {
  if (inputs.size() != targets.size()) throw std::invalid_argument("backward: input/target count mismatch");
  if (inputs.empty()) throw std::invalid_argument("backward: empty batch");

  Gradients grads;
  grads.layers.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    grads.layers[l].weights.assign(model.layers[l].weights.size(), 0.0f);
    grads.layers[l].bias.assign(model.layers[l].bias.size(), 0.0f);
  }

  const float batch = static_cast<float>(inputs.size());
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    const Trace trace = forward_trace(model, inputs[b]);
    require_same_shape(trace.output, targets[b], "backward");
    loss_sum += mse(trace.output, targets[b]);

    // dL/dy for this example's share of the batch mean.
    const float scale = 2.0f / (static_cast<float>(trace.output.size()) * batch);
    Signal grad = trace.output;
    for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] = scale * (trace.output.data[i] - targets[b].data[i]);

    for (std::size_t l = model.layers.size(); l-- > 0;) {
      const Layer& layer = model.layers[l];
      const LayerSpec& spec = layer.spec;
      const Signal& n = trace.normalized[l];
      const Signal& z = trace.pre[l];
      LayerGradients& g = grads.layers[l];

      for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] *= activation_slope(spec.activation, z.data[i]);

      Signal dn(n.channels, n.length);
      if (spec.kind == LayerKind::dense) {
        const std::size_t n_in = static_cast<std::size_t>(spec.inputs);
        for (int o = 0; o < spec.outputs; ++o) {
          const float dz = grad.data[o];
          if (dz == 0.0f) continue;
          const std::size_t row = static_cast<std::size_t>(o) * n_in;
          g.bias[o] += dz;
          for (std::size_t i = 0; i < n_in; ++i) {
            g.weights[row + i] += dz * n.data[i];
            dn.data[i] += layer.weights[row + i] * dz;
          }
        }
      } else {
        const int pad = conv_left_pad(spec);
        const int length = n.length;
        for (int f = 0; f < spec.outputs; ++f) {
          for (int t = 0; t < length; ++t) {
            const float dz = grad.at(f, t);
            if (dz == 0.0f) continue;
            g.bias[f] += dz;
            for (int c = 0; c < spec.inputs; ++c) {
              const std::size_t wrow = (static_cast<std::size_t>(f) * spec.inputs + c) * spec.kernel;
              for (int k = 0; k < spec.kernel; ++k) {
                const int src = t + k - pad;
                if (src < 0 || src >= length) continue;
                g.weights[wrow + k] += dz * n.at(c, src);
                dn.at(c, src) += layer.weights[wrow + k] * dz;
              }
            }
          }
        }
      }
      if (layer.sigma != 1.0f) {
        for (float& v : dn.data) v /= layer.sigma;
      }
      grad = std::move(dn);
    }
  }
  grads.loss = static_cast<float>(loss_sum / static_cast<double>(inputs.size()));
  return grads;
}

void TrainConfig::validate() const {
  QuantSpec{bits};
  if (!(learning_rate >= 0.0f) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be finite and >= 0");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
}

Model init_model(const std::vector<LayerSpec>& specs, std::uint64_t seed, QuantSpec spec) {
  Model model = make_zero_model(specs);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uniform(-0.5f, 0.5f);
  for (Layer& layer : model.layers) {
    const float scale = 1.0f / std::sqrt(static_cast<float>(layer.spec.fan_in()));
    for (float& w : layer.weights) w = uniform(rng) * scale;
  }
  return fraction_quantize_model(model, spec);
}

Model apply_update(const Model& model, const Gradients& grads, const TrainConfig& config) {
  if (!std::isfinite(grads.loss)) {
    throw std::runtime_error("training diverged: batch loss is " + std::to_string(grads.loss));
  }
  Model next = model;
  const float lr = config.learning_rate;
  auto update = [lr](std::vector<float>& params, const std::vector<float>& g) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      float v = std::clamp(params[i] - lr * g[i], -1.0f, 1.0f);
      if (classify(to_word(v)) == WordClass::subnormal) v = 0.0f;
      params[i] = v;
    }
  };
  for (std::size_t l = 0; l < next.layers.size(); ++l) {
    update(next.layers[l].weights, grads.layers[l].weights);
    update(next.layers[l].bias, grads.layers[l].bias);
  }
  return fraction_quantize_model(next, QuantSpec(config.bits));
}

Model train_step(const Model& model, std::span<const Signal> inputs, std::span<const Signal> targets,
                 const TrainConfig& config) {
  return apply_update(model, backward(model, inputs, targets), config);
}

TrainResult train(Model model, std::span<const Signal> inputs, std::span<const Signal> targets,
                  const TrainConfig& config) {
  config.validate();
  if (inputs.size() != targets.size()) throw std::invalid_argument("train: input/target count mismatch");
  TrainResult result;
  result.model = fraction_quantize_model(model, QuantSpec(config.bits));
  if (inputs.empty()) return result;

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::vector<Signal> batch_in;
  std::vector<Signal> batch_t;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch_in.clear();
      batch_t.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch_in.push_back(inputs[order[i]]);
        batch_t.push_back(targets[order[i]]);
      }
      const Gradients grads = backward(result.model, batch_in, batch_t);
      loss_sum += grads.loss;
      ++batches;
      result.model = apply_update(result.model, grads, config);
    }
    result.epoch_loss.push_back(static_cast<float>(loss_sum / static_cast<double>(batches)));
  }
  return result;
}

InferenceModel build_inference_model(const Model& model) {
  validate_sigmas(model);
  InferenceModel out;
  out.layers.reserve(model.layers.size());
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const Layer& layer = model.layers[li];
    InferenceLayer il;
    il.spec = layer.spec;
    il.bias = layer.bias;
    il.sigma = layer.sigma;
    il.sigma_adjusted = std::ldexp(layer.sigma, kInputShift);
    il.weights.reserve(layer.weights.size());
    for (std::size_t i = 0; i < layer.weights.size(); ++i) {
      try {
        il.weights.push_back(adjust_parameter(to_word(layer.weights[i]), &out.build_flushes));
      } catch (const std::exception& e) {
        throw ParameterError(li, i, e.what());
      }
    }
    for (std::size_t i = 0; i < layer.bias.size(); ++i) {
      if ((to_word(layer.bias[i]) & kFractionMask) != 0) {
        throw ParameterError(li, layer.weights.size() + i, "bias has a nonzero fraction");
      }
    }
    out.layers.push_back(std::move(il));
  }
  return out;
}

Signal infer(const InferenceModel& model, const Signal& input, FlushStats* stats) {
  Signal x = input;
  std::vector<AdjustedInput> adjusted;
  for (const InferenceLayer& layer : model.layers) {
    // sigma' = sigma * 2^64: dividing by it is one subtract of log2(sigma') from the exponent field.
    const int shift_log2 = unbiased_exponent(to_word(layer.sigma_adjusted)) - kInputShift;
    adjusted.resize(x.data.size());
    adjust_inputs(x.data, shift_log2, adjusted, stats);
    Signal y = output_shape(layer.spec, x);
    run_layer<AdjustedInput, AdjustedParam>(
        layer.spec, std::span<const AdjustedInput>(adjusted), x.length, std::span<const AdjustedParam>(layer.weights),
        std::span<const float>(layer.bias), [](AdjustedInput a, AdjustedParam b) { return seofp_multiply(a, b).value(); },
        std::span<float>(), std::span<float>(y.data));
    x = std::move(y);
  }
  return x;
}

Signal infer_reference(const Model& model, const Signal& input, FlushStats* stats) {
  validate_sigmas(model);
  Signal x = input;
  for (const Layer& layer : model.layers) {
    const Signal n = normalize(x, layer.sigma);
    Signal y = output_shape(layer.spec, n);
    run_layer<float, float>(
        layer.spec, std::span<const float>(n.data), n.length, std::span<const float>(layer.weights),
        std::span<const float>(layer.bias),
        [stats](float a, float b) { return reference_product(to_word(a), to_word(b), stats).value(); },
        std::span<float>(), std::span<float>(y.data));
    x = std::move(y);
  }
  return x;
}

}  // namespace seofp
