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

#include "seofp/dataset.hpp"

#include <cmath>
#include <bit>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace seofp {

namespace {

std::vector<float> clean_tone_mix(std::mt19937_64& rng, int length, int sample_rate) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> freq(80.0, 0.125 * sample_rate);
  std::uniform_real_distribution<double> amp(0.2, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  const int tones = count(rng);
  std::vector<double> mix(static_cast<std::size_t>(length), 0.0);
  for (int k = 0; k < tones; ++k) {
    const double f = freq(rng);
    const double a = amp(rng);
    const double p = phase(rng);
    for (int t = 0; t < length; ++t) mix[t] += a * std::sin(2.0 * std::numbers::pi * f * t / sample_rate + p);
  }
  double peak = 0.0;
  for (double v : mix) peak = std::max(peak, std::abs(v));
  std::vector<float> out(mix.size());
  for (std::size_t i = 0; i < mix.size(); ++i) out[i] = static_cast<float>(0.5 * mix[i] / peak);
  return out;
}

std::vector<double> noise_shape(std::mt19937_64& rng, NoiseKind kind, int length, int sample_rate) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(static_cast<std::size_t>(length));
  for (double& v : noise) v = gauss(rng);
  if (kind == NoiseKind::modulated) {
    std::uniform_real_distribution<double> rate(2.0, 8.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double f = rate(rng);
    const double p = phase(rng);
    for (int t = 0; t < length; ++t) noise[t] *= 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * f * t / sample_rate + p);
  }
  return noise;
}

std::vector<float> read_floats(const std::filesystem::path& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<float> out(count);
  for (float& v : out) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error(path.string() + " is truncated");
    const std::uint32_t w = std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
                            std::uint32_t{b[3]} << 24;
    v = std::bit_cast<float>(w);
  }
  return out;
}

void append_floats(std::ofstream& out, std::span<const float> values) {
  for (float v : values) {
    const std::uint32_t w = std::bit_cast<std::uint32_t>(v);
    const char b[4] = {static_cast<char>(w), static_cast<char>(w >> 8), static_cast<char>(w >> 16),
                       static_cast<char>(w >> 24)};
    out.write(b, 4);
  }
}

}  // namespace

const char* to_string(NoiseKind kind) noexcept { return kind == NoiseKind::white ? "white" : "modulated"; }

void DatasetConfig::validate() const {
  if (utterances <= 0 || length <= 0 || sample_rate <= 0 || test_every <= 0) {
    throw std::invalid_argument("dataset sizes must be positive");
  }
  if (snr_db.empty()) throw std::invalid_argument("at least one SNR level is required");
  for (double s : snr_db) {
    if (!std::isfinite(s)) throw std::invalid_argument("SNR levels must be finite");
    if (s < -30.0 || s > 60.0) throw std::invalid_argument("SNR levels must lie in [-30, 60] dB");
  }
}

Dataset generate_dataset(const DatasetConfig& config) {
  config.validate();
  Dataset ds;
  ds.config = config;
  std::mt19937_64 rng(config.seed);
  for (int u = 0; u < config.utterances; ++u) {
    Utterance utt;
    // Consecutive blocks of 2 * |snr| utterances cover every (SNR, noise) pair once; whole
    // blocks go to the test split so both splits see every condition.
    const int levels = static_cast<int>(config.snr_db.size());
    utt.snr_db = config.snr_db[static_cast<std::size_t>(u % levels)];
    utt.noise = (u / levels) % 2 == 0 ? NoiseKind::white : NoiseKind::modulated;
    utt.test = (u / (2 * levels)) % config.test_every == config.test_every - 1;
    utt.clean = clean_tone_mix(rng, config.length, config.sample_rate);
    const std::vector<double> noise = noise_shape(rng, utt.noise, config.length, config.sample_rate);

    double signal_power = 0.0;
    double noise_power = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
      signal_power += static_cast<double>(utt.clean[i]) * utt.clean[i];
      noise_power += noise[i] * noise[i];
    }
    const double gain = std::sqrt(signal_power / (noise_power * std::pow(10.0, utt.snr_db / 10.0)));
    utt.noisy.resize(utt.clean.size());
    for (std::size_t i = 0; i < noise.size(); ++i) {
      utt.noisy[i] = static_cast<float>(utt.clean[i] + gain * noise[i]);
    }
    ds.utterances.push_back(std::move(utt));
  }
  return ds;
}

double measured_snr_db(std::span<const float> clean, std::span<const float> noisy) {
  if (clean.size() != noisy.size()) throw std::invalid_argument("SNR: length mismatch");
  double s = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = static_cast<double>(noisy[i]) - clean[i];
    s += static_cast<double>(clean[i]) * clean[i];
    n += d * d;
  }
  if (n == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(s / n);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream clean(dir / "clean.f32", std::ios::binary | std::ios::trunc);
  std::ofstream noisy(dir / "noisy.f32", std::ios::binary | std::ios::trunc);
  if (!clean || !noisy) throw std::runtime_error("cannot write dataset files in " + dir.string());

  nlohmann::ordered_json meta;
  meta["format"] = "seofp-dataset";
  meta["seed"] = dataset.config.seed;
  meta["sample_rate"] = dataset.config.sample_rate;
  meta["length"] = dataset.config.length;
  meta["test_every"] = dataset.config.test_every;
  meta["snr_db"] = dataset.config.snr_db;
  meta["utterances"] = nlohmann::ordered_json::array();
  for (const Utterance& u : dataset.utterances) {
    append_floats(clean, u.clean);
    append_floats(noisy, u.noisy);
    meta["utterances"].push_back(
        {{"snr_db", u.snr_db}, {"noise", to_string(u.noise)}, {"split", u.test ? "test" : "train"}});
  }
  std::ofstream json(dir / "dataset.json", std::ios::trunc);
  json << meta.dump(2) << '\n';
  if (!clean || !noisy || !json) throw std::runtime_error("failed writing dataset in " + dir.string());
}

Dataset read_dataset(const std::filesystem::path& dir) {
  std::ifstream json(dir / "dataset.json");
  if (!json) throw std::runtime_error("cannot open " + (dir / "dataset.json").string());
  const nlohmann::json meta = nlohmann::json::parse(json);

  Dataset ds;
  ds.config.seed = meta.at("seed").get<std::uint64_t>();
  ds.config.sample_rate = meta.at("sample_rate").get<int>();
  ds.config.length = meta.at("length").get<int>();
  ds.config.test_every = meta.at("test_every").get<int>();
  ds.config.snr_db = meta.at("snr_db").get<std::vector<double>>();
  const auto& utts = meta.at("utterances");
  ds.config.utterances = static_cast<int>(utts.size());
  ds.config.validate();

  const std::size_t per = static_cast<std::size_t>(ds.config.length);
  const std::vector<float> clean = read_floats(dir / "clean.f32", per * utts.size());
  const std::vector<float> noisy = read_floats(dir / "noisy.f32", per * utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    Utterance u;
    u.snr_db = utts[i].at("snr_db").get<double>();
    u.noise = utts[i].at("noise").get<std::string>() == "white" ? NoiseKind::white : NoiseKind::modulated;
    u.test = utts[i].at("split").get<std::string>() == "test";
    u.clean.assign(clean.begin() + static_cast<std::ptrdiff_t>(i * per), clean.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    u.noisy.assign(noisy.begin() + static_cast<std::ptrdiff_t>(i * per), noisy.begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    ds.utterances.push_back(std::move(u));
  }
  return ds;
}

FrameSet make_frames(const Dataset& dataset, bool test_split, int frame_length) {
  if (frame_length <= 0) throw std::invalid_argument("frame length must be positive");
  FrameSet frames;
  for (const Utterance& u : dataset.utterances) {
    if (u.test != test_split) continue;
    for (std::size_t start = 0; start + frame_length <= u.clean.size(); start += static_cast<std::size_t>(frame_length)) {
      const auto first = static_cast<std::ptrdiff_t>(start);
      const auto last = first + frame_length;
      frames.inputs.push_back(Signal::from(std::vector<float>(u.noisy.begin() + first, u.noisy.begin() + last)));
      frames.targets.push_back(Signal::from(std::vector<float>(u.clean.begin() + first, u.clean.begin() + last)));
    }
  }
  return frames;
}

namespace {

float covering_power_of_two(float peak) {
  float sigma = 1.0f;
  while (sigma < peak) sigma *= 2.0f;
  return sigma;
}

}  // namespace

float input_sigma(const FrameSet& frames) {
  float peak = 0.0f;
  for (const Signal& s : frames.inputs) {
    for (float v : s.data) peak = std::max(peak, std::abs(v));
  }
  return covering_power_of_two(peak);
}

float input_sigma(const Dataset& dataset) {
  float peak = 0.0f;
  for (const Utterance& u : dataset.utterances) {
    for (float v : u.noisy) peak = std::max(peak, std::abs(v));
  }
  return covering_power_of_two(peak);
}

}  // namespace seofp
