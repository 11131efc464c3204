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

#include "seofp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "seofp/bitcore.hpp"

namespace seofp {

namespace {

int parse_count(std::string_view text, std::string_view token) {
  if (text.empty() || text.size() > 7) throw std::invalid_argument("bad layer token '" + std::string(token) + "'");
  int value = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("bad layer token '" + std::string(token) + "'");
    value = value * 10 + (ch - '0');
  }
  if (value <= 0) throw std::invalid_argument("layer sizes must be positive in '" + std::string(token) + "'");
  return value;
}

double snr_db(double signal, double error) {
  if (error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / error);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::vector<LayerSpec> parse_layers(std::string_view text, int frame_length) {
  if (frame_length <= 0) throw std::invalid_argument("frame length must be positive");
  std::vector<std::string_view> tokens;
  while (true) {
    const std::size_t comma = text.find(',');
    tokens.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }

  std::vector<LayerSpec> specs;
  int channels = 1;
  int length = frame_length;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    const Activation act = i + 1 == tokens.size() ? Activation::identity : Activation::clamp;
    if (tok.size() >= 2 && tok[0] == 'd') {
      const int units = parse_count(tok.substr(1), tok);
      specs.push_back(LayerSpec::dense(channels * length, units, act));
      channels = 1;
      length = units;
    } else if (tok.size() >= 4 && tok[0] == 'c' && tok.find('k') != std::string_view::npos) {
      const std::size_t k = tok.find('k');
      const int filters = parse_count(tok.substr(1, k - 1), tok);
      const int kernel = parse_count(tok.substr(k + 1), tok);
      specs.push_back(LayerSpec::conv1d(channels, filters, kernel, act));
      channels = filters;
    } else {
      throw std::invalid_argument("bad layer token '" + std::string(tok) + "' (expected d<N> or c<F>k<K>)");
    }
  }
  if (channels != 1 || length != frame_length) {
    throw std::invalid_argument("last layer yields " + std::to_string(channels) + "x" + std::to_string(length) +
                                ", frames need 1x" + std::to_string(frame_length));
  }
  return specs;
}

Metrics score(std::span<const Signal> outputs, const FrameSet& frames) {
  if (outputs.size() != frames.targets.size()) throw std::invalid_argument("output count differs from frame count");
  double clean = 0.0, in_err = 0.0, out_err = 0.0;
  std::size_t samples = 0;
  for (std::size_t f = 0; f < outputs.size(); ++f) {
    const Signal& target = frames.targets[f];
    if (outputs[f].size() != target.size()) throw std::invalid_argument("output shape differs from target");
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double t = target.data[i];
      const double in = frames.inputs[f].data[i] - t;
      const double out = outputs[f].data[i] - t;
      clean += t * t;
      in_err += in * in;
      out_err += out * out;
    }
    samples += target.size();
  }
  Metrics m;
  m.frames = outputs.size();
  if (samples == 0) return m;
  m.mse = out_err / static_cast<double>(samples);
  m.input_mse = in_err / static_cast<double>(samples);
  m.snr_in_db = snr_db(clean, in_err);
  m.snr_out_db = snr_db(clean, out_err);
  return m;
}

Metrics evaluate(const Model& model, const FrameSet& frames) {
  std::vector<Signal> outputs;
  outputs.reserve(frames.inputs.size());
  for (const Signal& in : frames.inputs) outputs.push_back(forward(model, in));
  return score(outputs, frames);
}

TrainResult train_on(const FrameSet& frames, float sigma, const TrainOptions& options) {
  options.train.validate();
  if (frames.inputs.empty()) throw std::invalid_argument("no training frames");
  Model model = init_model(parse_layers(options.layers, options.frame_length), options.train.seed,
                           QuantSpec(options.train.bits));
  model.layers.front().sigma = sigma;
  return train(std::move(model), frames.inputs, frames.targets, options.train);
}

const BitWidthRow& QuantStudy::row(int bits) const {
  for (const BitWidthRow& r : rows)
    if (r.bits == bits) return r;
  throw std::out_of_range("bit-width " + std::to_string(bits) + " not in study");
}

QuantStudy run_quant_study(const Dataset& dataset, const TrainOptions& options, const std::vector<int>& bits) {
  const FrameSet train_frames = make_frames(dataset, false, options.frame_length);
  const FrameSet test_frames = make_frames(dataset, true, options.frame_length);
  const float sigma = input_sigma(dataset);

  QuantStudy study;
  study.noisy = score(test_frames.inputs, test_frames);

  TrainOptions base = options;
  base.train.bits = 32;
  study.baseline = train_on(train_frames, sigma, base).model;

  for (int x : bits) {
    const QuantSpec spec(x);
    BitWidthRow row;
    row.bits = x;
    if (x == 32) {
      row.in_loop = study.baseline;
    } else {
      TrainOptions quantized = options;
      quantized.train.bits = x;
      row.in_loop = train_on(train_frames, sigma, quantized).model;
    }
    row.in_loop_metrics = evaluate(row.in_loop, test_frames);
    row.direct = direct_remove_model(study.baseline, spec);
    row.direct_metrics = evaluate(row.direct, test_frames);
    study.rows.push_back(std::move(row));
  }
  return study;
}

BenchReport bench(const Model& seofp_model, const Model& baseline, std::span<const Signal> inputs, int sample_rate,
                  int repeats) {
  if (repeats <= 0) throw std::invalid_argument("repeats must be positive");
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  if (inputs.empty()) throw std::invalid_argument("no inputs to time");

  const InferenceModel adjusted = build_inference_model(seofp_model);

  BenchReport report;
  report.repeats = repeats;
  std::size_t samples = 0;
  for (const Signal& in : inputs) samples += in.size();
  report.input_seconds = static_cast<double>(samples) / sample_rate;

  // Untimed pass: warms caches and yields the equivalence verdict.
  FlushStats flushes = adjusted.build_flushes;
  for (const Signal& in : inputs) {
    const Signal fast = infer(adjusted, in, &flushes);
    const Signal native = forward(seofp_model, in);
    for (std::size_t i = 0; i < fast.size(); ++i)
      if (to_word(fast.data[i]) != to_word(native.data[i])) ++report.mismatched_words;
    report.compared_words += fast.size();
    (void)forward(baseline, in);
  }
  report.flushes = flushes.total();

  volatile float sink = 0.0f;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r)
    for (const Signal& in : inputs) sink = sink + forward(baseline, in).data[0];
  const double baseline_ms = elapsed_ms(t0) / repeats;

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r)
    for (const Signal& in : inputs) sink = sink + infer(adjusted, in).data[0];
  const double seofp_ms = elapsed_ms(t0) / repeats;

  report.baseline = {"baseline (native multiply)", baseline.layers.size(), baseline.parameter_count(),
                     baseline_ms / report.input_seconds};
  report.seofp = {"SEOFP (integer add)", seofp_model.layers.size(), seofp_model.parameter_count(),
                  seofp_ms / report.input_seconds};
  report.speedup = baseline_ms / seofp_ms;
  return report;
}

std::string BenchReport::methodology() const {
  std::ostringstream out;
  out << "Each model runs over the same " << fixed(input_seconds, 3) << " s of input, " << repeats
      << " timed repetition(s) after one untimed pass, on " << threads << " thread. "
      << "Wall time comes from std::chrono::steady_clock around the whole loop and is divided by the "
      << "input duration. The baseline multiplies in single precision; the SEOFP model adds adjusted "
      << "words instead. Both accumulate left to right in single precision. Timings depend on the "
      << "host CPU and compiler and are reported, not asserted.";
  return out.str();
}

std::string BenchReport::to_markdown() const {
  std::vector<std::vector<std::string>> rows;
  for (const BenchTiming* t : {&baseline, &seofp})
    rows.push_back({t->label, std::to_string(t->layers), std::to_string(t->parameters), fixed(t->ms_per_input_second, 4)});
  std::string md = markdown_table({"Model", "Layers", "Parameters", "ms per input second"}, rows);
  md += "\n";
  md += markdown_table({"Speedup", "Flush-to-zero count", "Equivalence", "Compared words"},
                       {{fixed(speedup, 3) + "x", std::to_string(flushes),
                         equivalent() ? "PASS" : "FAIL (" + std::to_string(mismatched_words) + " mismatched)",
                         std::to_string(compared_words)}});
  md += "\nMethodology: " + methodology() + "\n";
  return md;
}

std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s = "|";
    for (const std::string& c : cells) s += " " + c + " |";
    return s + "\n";
  };
  std::string md = line(header);
  md += "|";
  for (std::size_t i = 0; i < header.size(); ++i) md += i == 0 ? " --- |" : " ---: |";
  md += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("markdown row has the wrong number of cells");
    md += line(row);
  }
  return md;
}

std::string fixed(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace seofp
