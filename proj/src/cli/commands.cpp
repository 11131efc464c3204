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

#include "seofp/commands.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <random>

#include "seofp/bitcore.hpp"

namespace seofp {

namespace {

template <typename Fn>
auto guarded(const char* command, Fn&& fn) {
  try {
    return fn();
  } catch (const CommandError&) {
    throw;
  } catch (const std::exception& e) {
    throw CommandError(command, e.what());
  }
}

bool fractions_zero(const Model& model) {
  bool zero = true;
  model.for_each_parameter([&](float v) { zero = zero && split(to_word(v)).fraction == 0; });
  return zero;
}

std::string kb(std::size_t bytes) { return fixed(static_cast<double>(bytes) / 1024.0, 2); }

std::string signed_percent(double value) { return (value > 0 ? "+" : "") + fixed(value, 3) + "%"; }

void write_f32(const fs::path& path, std::span<const Signal> signals) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (const Signal& s : signals)
    for (float v : s.data) {
      const std::uint32_t w = to_word(v);
      const char bytes[4] = {static_cast<char>(w), static_cast<char>(w >> 8), static_cast<char>(w >> 16),
                             static_cast<char>(w >> 24)};
      out.write(bytes, 4);
    }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

Dataset cmd_gen_data(const DatasetConfig& config, const fs::path& out_dir) {
  return guarded("gen-data", [&] {
    Dataset ds = generate_dataset(config);
    write_dataset(ds, out_dir);
    return ds;
  });
}

std::string TrainReport::to_markdown() const {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
    rows.push_back({std::to_string(e + 1), fixed(result.epoch_loss[e], 6)});
  std::string md = markdown_table({"Epoch", "Train MSE"}, rows);
  md += "\n";
  md += markdown_table({"Split", "Noisy MSE", "Enhanced MSE", "SNR in (dB)", "SNR out (dB)", "SNR improvement (dB)"},
                       {{"test", fixed(test.input_mse, 6), fixed(test.mse, 6), fixed(test.snr_in_db, 2),
                         fixed(test.snr_out_db, 2), fixed(test.snr_improvement_db(), 2)}});
  return md;
}

TrainReport cmd_train(const fs::path& data_dir, const TrainOptions& options, const fs::path& out) {
  return guarded("train", [&] {
    const Dataset ds = read_dataset(data_dir);
    TrainReport report;
    report.result = train_on(make_frames(ds, false, options.frame_length), input_sigma(ds), options);
    report.test = evaluate(report.result.model, make_frames(ds, true, options.frame_length));
    write_packed(out, report.result.model, Encoding::full32);
    return report;
  });
}

QuantMode parse_quant_mode(const std::string& name) {
  if (name == "fraction") return QuantMode::fraction;
  if (name == "direct") return QuantMode::direct;
  throw std::invalid_argument("unknown quantization mode '" + name + "' (expected fraction or direct)");
}

Model cmd_quantize(const fs::path& model_path, int bits, QuantMode mode, const fs::path& out) {
  return guarded("quantize", [&] {
    const QuantSpec spec(bits);
    const Model in = read_packed(model_path);
    Model q = mode == QuantMode::fraction ? fraction_quantize_model(in, spec) : direct_remove_model(in, spec);
    write_packed(out, q, Encoding::full32);
    return q;
  });
}

double PackReport::ratio_percent() const {
  return compression_ratio(static_cast<double>(packed.total()), static_cast<double>(baseline.total()));
}

std::string PackReport::to_markdown() const {
  const std::string width = codebook ? std::to_string(codebook->width) : "-";
  const std::string bits = encoding == Encoding::full32          ? "32"
                           : encoding == Encoding::sign_exponent9 ? "9"
                                                                  : std::to_string(codebook->bits_per_parameter());
  return markdown_table({"Encoding", "Parameters", "Bits per parameter", "Codebook width", "Header (B)",
                         "Payload (B)", "Size (KB)", "32-bit size (KB)", "Ratio"},
                        {{to_string(encoding), std::to_string(parameters), bits, width,
                          std::to_string(packed.header_bytes), std::to_string(packed.payload_bytes),
                          kb(packed.total()), kb(baseline.total()), signed_percent(ratio_percent())}});
}

PackReport cmd_pack(const fs::path& model_path, Encoding encoding, const fs::path& out) {
  return guarded("pack", [&] {
    const Model model = read_packed(model_path);
    PackReport report;
    report.encoding = encoding;
    report.parameters = model.parameter_count();
    report.packed = packed_size(model, encoding);
    report.baseline = packed_size(model, Encoding::full32);
    if (encoding == Encoding::codebook) report.codebook = ExponentCodebook::covering(parameter_words(model));
    write_packed(out, model, encoding);
    return report;
  });
}

std::string InferReport::to_markdown() const {
  return markdown_table({"Path", "Frames", "Noisy MSE", "Enhanced MSE", "SNR improvement (dB)", "Flush-to-zero count"},
                        {{integer_add ? "integer add" : "native multiply", std::to_string(metrics.frames),
                          fixed(metrics.input_mse, 6), fixed(metrics.mse, 6), fixed(metrics.snr_improvement_db(), 2),
                          std::to_string(flushes.total())}});
}

InferReport cmd_infer(const fs::path& model_path, const fs::path& data_dir, int frame_length,
                      const std::optional<fs::path>& out) {
  return guarded("infer", [&] {
    const Model model = read_packed(model_path);
    const FrameSet frames = make_frames(read_dataset(data_dir), true, frame_length);

    InferReport report;
    report.integer_add = fractions_zero(model);
    std::vector<Signal> outputs;
    outputs.reserve(frames.inputs.size());
    if (report.integer_add) {
      const InferenceModel adjusted = build_inference_model(model);
      report.flushes = adjusted.build_flushes;
      for (const Signal& in : frames.inputs) outputs.push_back(infer(adjusted, in, &report.flushes));
    } else {
      for (const Signal& in : frames.inputs) outputs.push_back(forward(model, in));
    }
    report.metrics = score(outputs, frames);
    if (out) write_f32(*out, outputs);
    return report;
  });
}

std::string VerifyReport::to_markdown() const {
  return markdown_table({"Inputs", "Output words", "Mismatches vs native", "Mismatches vs reference",
                         "Flush-to-zero count", "Verdict"},
                        {{std::to_string(inputs), std::to_string(words), std::to_string(native_mismatches),
                          std::to_string(reference_mismatches), std::to_string(flushes.total()),
                          pass() ? "PASS" : "FAIL"}});
}

std::vector<Signal> random_inputs(const Model& model, int count, int length, std::uint64_t seed) {
  if (model.layers.empty()) throw std::invalid_argument("model has no layers");
  if (count <= 0 || length <= 0) throw std::invalid_argument("input count and length must be positive");
  const Layer& first = model.layers.front();
  const int channels = first.spec.kind == LayerKind::dense ? 1 : first.spec.inputs;
  const int samples = first.spec.kind == LayerKind::dense ? first.spec.inputs : length;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-first.sigma, first.sigma);
  std::vector<Signal> inputs;
  for (int i = 0; i < count; ++i) {
    Signal s(channels, samples);
    for (float& v : s.data) v = dist(rng);
    inputs.push_back(std::move(s));
  }
  return inputs;
}

VerifyReport verify(const Model& model, std::span<const Signal> inputs) {
  const InferenceModel adjusted = build_inference_model(model);
  VerifyReport report;
  report.flushes = adjusted.build_flushes;
  for (const Signal& in : inputs) {
    const Signal fast = infer(adjusted, in, &report.flushes);
    const Signal native = forward(model, in);
    const Signal ref = infer_reference(model, in);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      const std::uint32_t w = to_word(fast.data[i]);
      if (w != to_word(native.data[i])) ++report.native_mismatches;
      if (w != to_word(ref.data[i])) ++report.reference_mismatches;
    }
    report.words += fast.size();
    ++report.inputs;
  }
  return report;
}

VerifyReport cmd_verify(const fs::path& model_path, const std::optional<fs::path>& data_dir, int frame_length,
                        int count, std::uint64_t seed) {
  return guarded("verify", [&] {
    const Model model = read_packed(model_path);
    if (data_dir) {
      const FrameSet frames = make_frames(read_dataset(*data_dir), true, frame_length);
      return verify(model, frames.inputs);
    }
    const std::vector<Signal> inputs = random_inputs(model, count, frame_length, seed);
    return verify(model, inputs);
  });
}

BenchReport cmd_bench(const fs::path& model_path, const fs::path& data_dir, int frame_length,
                      const std::optional<fs::path>& baseline_path, int repeats) {
  return guarded("bench", [&] {
    const Model model = read_packed(model_path);
    const Model baseline = baseline_path ? read_packed(*baseline_path) : model;
    const Dataset ds = read_dataset(data_dir);
    const FrameSet frames = make_frames(ds, true, frame_length);
    return bench(model, baseline, frames.inputs, ds.config.sample_rate, repeats);
  });
}

std::string cmd_report(const ReportOptions& options) {
  return guarded("report", [&] {
    if (std::find(options.bits.begin(), options.bits.end(), 9) == options.bits.end())
      throw std::invalid_argument("report needs bit-width 9 in the sweep");
    const Dataset ds = generate_dataset(options.data);
    const QuantStudy study = run_quant_study(ds, options.train, options.bits);
    const FrameSet test = make_frames(ds, true, options.train.frame_length);

    std::string md = "# SEOFP report\n\n";
    md += "Layers `" + options.train.layers + "`, frame " + std::to_string(options.train.frame_length) +
          ", epochs " + std::to_string(options.train.train.epochs) + ", learning rate " +
          fixed(options.train.train.learning_rate, 4) + ", batch " + std::to_string(options.train.train.batch_size) +
          ", seed " + std::to_string(options.train.train.seed) + ", " + std::to_string(study.noisy.frames) +
          " test frames.\n\n";

    md += "## Test quality per retained bit-width\n\n";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"noisy input", fixed(study.noisy.mse, 6), "0.00", fixed(study.noisy.mse, 6), "0.00"});
    for (const BitWidthRow& r : study.rows)
      rows.push_back({std::to_string(r.bits), fixed(r.in_loop_metrics.mse, 6),
                      fixed(r.in_loop_metrics.snr_improvement_db(), 2), fixed(r.direct_metrics.mse, 6),
                      fixed(r.direct_metrics.snr_improvement_db(), 2)});
    md += markdown_table({"Bits", "Fraction quantize MSE", "SNR improvement (dB)", "Direct remove MSE",
                          "SNR improvement (dB)"},
                         rows);

    md += "\n## Model size\n\n";
    const Model& m9 = study.row(9).in_loop;
    const PackedSize full = packed_size(study.baseline, Encoding::full32);
    const PackedSize se9 = packed_size(m9, Encoding::sign_exponent9);
    const PackedSize coded = packed_size(m9, Encoding::codebook);
    const ExponentCodebook book = ExponentCodebook::covering(parameter_words(m9));
    const double base = static_cast<double>(full.total());
    md += markdown_table(
        {"Model", "Parameters", "32-bit (KB)", "SE9 (KB)", "SE9 ratio", "Codebook width", "Codebook (KB)",
         "Codebook ratio"},
        {{options.train.layers, std::to_string(m9.parameter_count()), kb(full.total()), kb(se9.total()),
          signed_percent(compression_ratio(static_cast<double>(se9.total()), base)), std::to_string(book.width),
          kb(coded.total()), signed_percent(compression_ratio(static_cast<double>(coded.total()), base))}});

    md += "\n## Inference time\n\n";
    const BenchReport same = bench(m9, study.baseline, test.inputs, ds.config.sample_rate, options.bench_repeats);
    TrainOptions deeper = options.train;
    deeper.layers = "c8k9,c8k9," + options.train.layers;
    deeper.train.bits = 9;
    const Model deep9 = train_on(make_frames(ds, false, options.train.frame_length), input_sigma(ds), deeper).model;
    const BenchReport deep = bench(deep9, study.baseline, test.inputs, ds.config.sample_rate, options.bench_repeats);
    std::vector<std::vector<std::string>> timing;
    for (const BenchReport* r : {&same, &deep})
      timing.push_back({std::to_string(r->seofp.layers), std::to_string(r->baseline.layers),
                        fixed(r->baseline.ms_per_input_second, 4), fixed(r->seofp.ms_per_input_second, 4),
                        fixed(r->speedup, 3) + "x", std::to_string(r->flushes), r->equivalent() ? "PASS" : "FAIL"});
    md += markdown_table({"SEOFP layers", "Baseline layers", "Baseline ms per input second",
                          "SEOFP ms per input second", "Speedup", "Flush-to-zero count", "Equivalence"},
                         timing);
    md += "\nMethodology: " + same.methodology() + "\n";
    return md;
  });
}

}  // namespace seofp
