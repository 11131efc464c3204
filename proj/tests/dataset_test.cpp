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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "doctest.h"
#include "seofp/dataset.hpp"

using namespace seofp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seofp_dataset_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("requested SNR is met in the written files") {
  DatasetConfig cfg;
  cfg.seed = 1;
  cfg.snr_db = {12.0};
  cfg.utterances = 6;
  const fs::path dir = scratch("snr12");
  write_dataset(generate_dataset(cfg), dir);
  const Dataset back = read_dataset(dir);
  REQUIRE(back.utterances.size() == 6);
  for (const Utterance& u : back.utterances) CHECK(std::fabs(measured_snr_db(u.clean, u.noisy) - 12.0) < 0.1);
  fs::remove_all(dir);
}

TEST_CASE("every level of the default sweep is met") {
  const Dataset ds = generate_dataset(DatasetConfig{});
  for (const Utterance& u : ds.utterances) {
    CHECK(std::fabs(measured_snr_db(u.clean, u.noisy) - u.snr_db) < 0.1);
    for (float v : u.clean) REQUIRE(std::fabs(v) <= 0.5f);
  }
}

TEST_CASE("same seed gives byte-identical files") {
  DatasetConfig cfg;
  cfg.seed = 9;
  cfg.utterances = 8;
  const fs::path a = scratch("a"), b = scratch("b"), c = scratch("c");
  write_dataset(generate_dataset(cfg), a);
  write_dataset(generate_dataset(cfg), b);
  cfg.seed = 10;
  write_dataset(generate_dataset(cfg), c);
  for (const char* f : {"clean.f32", "noisy.f32", "dataset.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "noisy.f32") != slurp(c / "noisy.f32"));
  for (const fs::path& p : {a, b, c}) fs::remove_all(p);
}

TEST_CASE("configuration validation") {
  DatasetConfig cfg;
  cfg.snr_db = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg.snr_db = {std::nan("")};
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg.snr_db = {-45.0};
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg.snr_db = {};
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  cfg = DatasetConfig{};
  cfg.utterances = 0;
  CHECK_THROWS_AS(generate_dataset(cfg), std::invalid_argument);
  CHECK_THROWS(read_dataset(scratch("missing")));
}

TEST_CASE("both splits cover every condition") {
  const Dataset ds = generate_dataset(DatasetConfig{});
  std::set<std::pair<double, int>> train, test;
  for (const Utterance& u : ds.utterances) (u.test ? test : train).insert({u.snr_db, static_cast<int>(u.noise)});
  CHECK(train.size() == 8);
  CHECK(test.size() == 8);
}

TEST_CASE("frames and input scale") {
  DatasetConfig cfg;
  cfg.utterances = 32;
  const Dataset ds = generate_dataset(cfg);
  const FrameSet train = make_frames(ds, false, 64);
  const FrameSet test = make_frames(ds, true, 64);
  std::size_t test_utts = 0;
  for (const Utterance& u : ds.utterances) test_utts += u.test;
  CHECK(test_utts == 8);
  CHECK(test.inputs.size() == test_utts * (2048 / 64));
  CHECK(train.inputs.size() == (32 - test_utts) * (2048 / 64));
  CHECK(train.inputs[0].length == 64);
  CHECK(train.targets[1].data[0] == ds.utterances[0].clean[64]);
  CHECK(make_frames(ds, false, 3000).inputs.empty());
  CHECK_THROWS_AS(make_frames(ds, false, 0), std::invalid_argument);

  const float sigma = input_sigma(train);
  float peak = 0.0f;
  for (const Signal& s : train.inputs)
    for (float v : s.data) peak = std::max(peak, std::fabs(v));
  CHECK(sigma >= peak);
  CHECK((sigma == 1.0f || sigma / 2.0f < peak));
  CHECK(std::ldexp(1.0f, std::ilogb(sigma)) == sigma);
  CHECK(input_sigma(FrameSet{}) == 1.0f);
  CHECK(input_sigma(ds) >= sigma);
  CHECK(input_sigma(ds) >= input_sigma(test));
  CHECK(input_sigma(Dataset{}) == 1.0f);
}
