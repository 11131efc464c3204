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

#ifndef SEOFP_PIPELINE_HPP_
#define SEOFP_PIPELINE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seofp/dataset.hpp"
#include "seofp/nn.hpp"

namespace seofp {

/// Parses a comma-separated layer list for single-channel frames of `frame_length` samples.
///
///   d<N>       dense layer with N outputs
///   c<F>k<K>   conv1d layer with F filters of K taps
///
/// Hidden layers use the clamp activation, the last layer is linear. The last layer must produce
/// one channel of `frame_length` samples. Throws std::invalid_argument on bad syntax or shapes.
std::vector<LayerSpec> parse_layers(std::string_view text, int frame_length);

/// Quality of an enhanced split against its clean targets.
struct Metrics {
  double mse = 0.0;        // enhanced vs clean, mean over samples
  double input_mse = 0.0;  // noisy vs clean
  double snr_in_db = 0.0;
  double snr_out_db = 0.0;
  std::size_t frames = 0;

  double snr_improvement_db() const noexcept { return snr_out_db - snr_in_db; }
};

Metrics score(std::span<const Signal> outputs, const FrameSet& frames);

/// Native forward over every frame, then score.
Metrics evaluate(const Model& model, const FrameSet& frames);

struct TrainOptions {
  std::string layers = "c8k9,c1k9";
  int frame_length = 64;
  TrainConfig train = {32, 0.25f, 20, 16, 1};
};

/// Initializes a model from options.layers (seeded by options.train.seed), sets the first layer's
/// sigma and runs quantize-in-loop training at options.train.bits.
TrainResult train_on(const FrameSet& frames, float sigma, const TrainOptions& options);

struct BitWidthRow {
  int bits = 32;
  Model in_loop;        // trained with quantization after every update
  Metrics in_loop_metrics;
  Model direct;         // x=32 baseline with the low fraction bits dropped afterwards
  Metrics direct_metrics;
};

struct QuantStudy {
  Metrics noisy;  // test split without enhancement
  Model baseline;
  std::vector<BitWidthRow> rows;

  /// Row for a bit-width. Throws std::out_of_range if it was not part of the study.
  const BitWidthRow& row(int bits) const;
};

/// Trains the x=32 baseline and one quantize-in-loop model per bit-width with otherwise identical
/// options, and scores each on the test split next to the direct-removal variant of the baseline.
QuantStudy run_quant_study(const Dataset& dataset, const TrainOptions& options, const std::vector<int>& bits);

struct BenchTiming {
  std::string label;
  std::size_t layers = 0;
  std::size_t parameters = 0;
  double ms_per_input_second = 0.0;
};

struct BenchReport {
  BenchTiming baseline;  // native multiplies
  BenchTiming seofp;     // integer-add kernel
  double speedup = 0.0;  // baseline / seofp
  std::size_t flushes = 0;
  std::size_t mismatched_words = 0;
  std::size_t compared_words = 0;
  int repeats = 0;
  int threads = 1;
  double input_seconds = 0.0;

  bool equivalent() const noexcept { return mismatched_words == 0; }
  std::string methodology() const;
  std::string to_markdown() const;
};

/// Times native forward of `baseline` against integer-add inference of `seofp_model` over the
/// inputs, repeats times each after one untimed pass. Equivalence and flushes refer to
/// seofp_model evaluated both ways. Single-threaded.
BenchReport bench(const Model& seofp_model, const Model& baseline, std::span<const Signal> inputs,
                  int sample_rate, int repeats);

/// Markdown pipe table. Every row must have header.size() cells.
std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows);

std::string fixed(double value, int decimals);

}  // namespace seofp

#endif  // SEOFP_PIPELINE_HPP_
