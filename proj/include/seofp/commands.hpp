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

#ifndef SEOFP_COMMANDS_HPP_
#define SEOFP_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seofp/pack.hpp"
#include "seofp/pipeline.hpp"

namespace seofp {

/// A failure inside a command, prefixed with the command name.
class CommandError : public std::runtime_error {
 public:
  CommandError(const std::string& command, const std::string& what)
      : std::runtime_error(command + ": " + what), command_(command) {}
  const std::string& command() const noexcept { return command_; }

 private:
  std::string command_;
};

namespace fs = std::filesystem;

Dataset cmd_gen_data(const DatasetConfig& config, const fs::path& out_dir);

struct TrainReport {
  TrainResult result;
  Metrics test;
  std::string to_markdown() const;
};

/// Trains on the dataset in data_dir and writes the model as full32 .seofp.
TrainReport cmd_train(const fs::path& data_dir, const TrainOptions& options, const fs::path& out);

enum class QuantMode { fraction, direct };

QuantMode parse_quant_mode(const std::string& name);

/// Post-training quantization of a stored model, written back as full32.
Model cmd_quantize(const fs::path& model_path, int bits, QuantMode mode, const fs::path& out);

struct PackReport {
  Encoding encoding = Encoding::full32;
  PackedSize packed;
  PackedSize baseline;  // same model as full32
  std::size_t parameters = 0;
  std::optional<ExponentCodebook> codebook;

  double ratio_percent() const;
  std::string to_markdown() const;
};

PackReport cmd_pack(const fs::path& model_path, Encoding encoding, const fs::path& out);

struct InferReport {
  Metrics metrics;
  bool integer_add = false;  // false when the model has fractions and needs native multiplies
  FlushStats flushes;
  std::string to_markdown() const;
};

/// Enhances the test split cut into frames of frame_length samples. Writes enhanced frames as
/// little-endian float32 when out is set.
InferReport cmd_infer(const fs::path& model_path, const fs::path& data_dir, int frame_length,
                      const std::optional<fs::path>& out);

struct VerifyReport {
  std::size_t inputs = 0;
  std::size_t words = 0;
  std::size_t native_mismatches = 0;     // integer-add vs native multiply
  std::size_t reference_mismatches = 0;  // integer-add vs reference multiplier
  FlushStats flushes;

  bool pass() const noexcept { return native_mismatches == 0 && reference_mismatches == 0; }
  std::string to_markdown() const;
};

/// Inputs uniform in [-sigma, sigma] of the first layer, shaped for the model. Conv models get
/// single-channel inputs of `length` samples.
std::vector<Signal> random_inputs(const Model& model, int count, int length, std::uint64_t seed);

VerifyReport verify(const Model& model, std::span<const Signal> inputs);

/// Checks a stored model on the test split of data_dir, or on random inputs when data_dir is empty.
VerifyReport cmd_verify(const fs::path& model_path, const std::optional<fs::path>& data_dir, int frame_length,
                        int count, std::uint64_t seed);

/// Times the model on the test split of data_dir. Without baseline_path the baseline is the same
/// model evaluated with native multiplies.
BenchReport cmd_bench(const fs::path& model_path, const fs::path& data_dir, int frame_length,
                      const std::optional<fs::path>& baseline_path, int repeats);

struct ReportOptions {
  DatasetConfig data;
  TrainOptions train;
  std::vector<int> bits = {32, 26, 20, 14, 10, 9};
  int bench_repeats = 5;
};

/// Runs the whole pipeline and renders markdown tables for quality per bit-width, packed sizes
/// and inference time.
std::string cmd_report(const ReportOptions& options);

}  // namespace seofp

#endif  // SEOFP_COMMANDS_HPP_
