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

#ifndef SEOFP_DATASET_HPP_
#define SEOFP_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "seofp/nn.hpp"

namespace seofp {

enum class NoiseKind { white, modulated };

const char* to_string(NoiseKind kind) noexcept;

struct DatasetConfig {
  std::uint64_t seed = 1;
  int utterances = 48;
  std::vector<double> snr_db = {-6.0, 0.0, 6.0, 12.0};
  int length = 2048;         // samples per utterance
  int sample_rate = 8000;    // Hz
  int test_every = 4;        // every n-th block of (SNR, noise) conditions goes to the test split

  /// Throws std::invalid_argument for non-finite SNRs, SNRs outside [-30, 60] dB, or
  /// non-positive sizes.
  void validate() const;
};

/// One synthetic utterance: a sum of 3 to 8 random-phase sinusoids plus scaled noise.
struct Utterance {
  std::vector<float> clean;
  std::vector<float> noisy;
  double snr_db = 0.0;
  NoiseKind noise = NoiseKind::white;
  bool test = false;
};

struct Dataset {
  DatasetConfig config;
  std::vector<Utterance> utterances;
};

/// Deterministic for a given config. Clean samples lie in [-0.5, 0.5]; noise alternates between
/// stationary white and amplitude-modulated white and is scaled to the requested SNR.
Dataset generate_dataset(const DatasetConfig& config);

/// 10 log10(sum clean^2 / sum (noisy - clean)^2).
double measured_snr_db(std::span<const float> clean, std::span<const float> noisy);

/// Writes clean.f32 and noisy.f32 (little-endian float32, utterances back to back) and
/// dataset.json describing them.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

/// Non-overlapping noisy/clean frame pairs from one split.
struct FrameSet {
  std::vector<Signal> inputs;
  std::vector<Signal> targets;
};

FrameSet make_frames(const Dataset& dataset, bool test_split, int frame_length);

/// Smallest power of two >= every input magnitude (at least 1).
float input_sigma(const FrameSet& frames);
/// Same over every noisy sample of both splits.
float input_sigma(const Dataset& dataset);

}  // namespace seofp

#endif  // SEOFP_DATASET_HPP_
