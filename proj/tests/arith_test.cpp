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
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "seofp/arith.hpp"

using namespace seofp;

namespace {

// Normalized input with |a| <= 1 whose adjusted exponent stays positive.
std::uint32_t random_input(std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> exp(kInputShift + 1, 126);
  return (rng() & 1u) << 31 | exp(rng) << 23 | (rng() & kFractionMask);
}

float native(std::uint32_t a, std::uint32_t b) {
  volatile float x = from_word(a);
  volatile float y = from_word(b);
  return x * y;
}

}  // namespace

TEST_CASE("reference multiplier") {
  const ProductWord p = reference_multiply(to_word(32.0f), to_word(8.0f));
  CHECK(p.value() == 256.0f);
  CHECK(split(p.word).exponent == 0b10000111u);
  CHECK(split(to_word(32.0f)).exponent == 0b10000100u);
  CHECK(split(to_word(8.0f)).exponent == 0b10000010u);

  CHECK(reference_multiply(to_word(-0.8765f), to_word(-0.125f)).word == to_word(0.1095625f));
  CHECK(reference_multiply(0u, to_word(3.0f)).word == 0u);
  CHECK(reference_multiply(0x80000000u, to_word(3.0f)).word == 0u);

  std::mt19937 rng(7);
  for (int i = 0; i < 100000; ++i) {
    const std::uint32_t a = (rng() & 1u) << 31 | (1 + rng() % 254) << 23 | (rng() & kFractionMask);
    REQUIRE(reference_multiply(a, to_word(1.0f)).word == a);
    // Zero-fraction second operand with exponents kept inside the normal range.
    const int ea = static_cast<int>(split(a).exponent);
    const int lo = std::max(1, 128 - ea + 1), hi = std::min(254, 254 + 127 - ea - 1);
    if (lo > hi) continue;
    const std::uint32_t b = (rng() & 1u) << 31 | static_cast<std::uint32_t>(lo + static_cast<int>(rng() % (hi - lo + 1))) << 23;
    REQUIRE(reference_multiply(a, b).word == to_word(native(a, b)));
  }
  // Both fractions nonzero but the product exact: 1.5 * 1.5.
  CHECK(reference_multiply(to_word(1.5f), to_word(1.5f)).value() == 2.25f);

  CHECK_THROWS_AS(reference_multiply(to_word(0x1p100f), to_word(0x1p100f)), std::overflow_error);
  CHECK_THROWS_AS(reference_multiply(to_word(0x1p-100f), to_word(0x1p-100f)), std::underflow_error);
  CHECK_THROWS_AS(reference_multiply(0x7F800000u, to_word(1.0f)), FloatFormatError);
  CHECK_THROWS_AS(reference_multiply(to_word(1.0f), 0x00000010u), FloatFormatError);
}

TEST_CASE("parameter adjustment") {
  CHECK(adjust_parameter(to_word(-0.125f)).word == 0x9E800000u);
  CHECK(split(adjust_parameter(to_word(1.0f)).word).exponent == 64u);
  CHECK(adjust_parameter(0u).word == 0u);
  CHECK(adjust_parameter(0x80000000u).word == 0u);
  CHECK_THROWS_AS(adjust_parameter(to_word(0.75f)), std::invalid_argument);
  CHECK_THROWS_AS(adjust_parameter(to_word(2.0f)), std::domain_error);
  CHECK_THROWS_AS(adjust_parameter(0x7F800000u), FloatFormatError);

  FlushStats stats;
  CHECK(adjust_parameter(to_word(0x1p-64f), &stats).word == 0u);  // exponent field 63
  CHECK(stats.params == 1);
  CHECK(adjust_parameter(to_word(0x1p-63f), &stats).word == 1u << 23);  // exponent field 64
  CHECK(stats.params == 1);
}

TEST_CASE("input adjustment") {
  CHECK(to_word(-0.8765f) == 0xBF60624Eu);
  CHECK(adjust_input(to_word(-0.8765f)).word == 0x9F60624Eu);
  CHECK(split(adjust_input(to_word(1.0f)).word).exponent == 63u);
  CHECK(adjust_input(0u).word == 0u);
  CHECK(adjust_input(0x80000000u).word == 0u);
  CHECK_THROWS_AS(adjust_input(to_word(1.0000001f)), std::domain_error);
  CHECK_THROWS_AS(adjust_input(to_word(-2.0f)), std::domain_error);

  std::mt19937 rng(9);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t a = random_input(rng);
    const std::uint32_t adj = adjust_input(a).word;
    REQUIRE((adj & kFractionMask) == (a & kFractionMask));
    REQUIRE((adj >> 31) == (a >> 31));
    REQUIRE((split(adj).exponent >> 7) == 0u);
  }

  FlushStats stats;
  CHECK(adjust_input(to_word(0x1p-63f), &stats).word == 0u);  // exponent field 64
  CHECK(stats.inputs == 1);
  CHECK(adjust_input(to_word(0x1.8p-63f), &stats).word == 0u);
  CHECK(stats.inputs == 2);
  CHECK(adjust_input(to_word(0x1p-62f), &stats).word == 1u << 23);
  CHECK(stats.inputs == 2);
}

TEST_CASE("input adjustment with a normalization scale") {
  // Dividing by sigma = 4 and by 2^64 is one exponent subtract of 66.
  CHECK(adjust_input(to_word(-3.0f), 2).word == to_word(-3.0f) - (66u << 23));
  CHECK(adjust_input(to_word(4.0f), 2).word == to_word(4.0f) - (66u << 23));
  CHECK_THROWS_AS(adjust_input(to_word(4.5f), 2), std::domain_error);
  CHECK_THROWS_AS(adjust_input(to_word(1.0f), 64), std::out_of_range);
  CHECK(adjust_input(to_word(0.25f), -2).word == to_word(1.0f) - (64u << 23));

  std::mt19937 rng(10);
  std::vector<float> in;
  for (int i = 0; i < 5000; ++i) {
    const std::uint32_t w = random_input(rng) + (2u << 23);  // |a| <= 4
    in.push_back(from_word(w));
  }
  in.push_back(0.0f);
  in.push_back(-0.0f);
  in.push_back(0x1p-61f);  // exponent field 66: flushed at sigma 4
  std::vector<AdjustedInput> out(in.size());
  FlushStats batch, single;
  adjust_inputs(in, 2, out, &batch);
  for (std::size_t i = 0; i < in.size(); ++i) REQUIRE(out[i].word == adjust_input(to_word(in[i]), 2, &single).word);
  CHECK(batch.inputs == 1);
  CHECK(single.inputs == 1);

  std::vector<AdjustedInput> one(1);
  const std::vector<float> too_big = {4.5f}, subnormal = {from_word(5u)}, inf = {from_word(0x7F800000u)};
  CHECK_THROWS_AS(adjust_inputs(too_big, 2, one), std::domain_error);
  CHECK_THROWS_AS(adjust_inputs(subnormal, 2, one), FloatFormatError);
  CHECK_THROWS_AS(adjust_inputs(inf, 2, one), FloatFormatError);
  CHECK_THROWS_AS(adjust_inputs(too_big, 2, out), std::invalid_argument);
}

TEST_CASE("integer-add product") {
  const AdjustedInput a = adjust_input(to_word(-0.8765f));
  const AdjustedParam b = adjust_parameter(to_word(-0.125f));
  CHECK(a.word + b.word == 0x3DE0624Eu);
  CHECK(seofp_multiply(a, b).word == 0x3DE0624Eu);
  CHECK(seofp_multiply(a, b).word == to_word(0.1095625f));
  CHECK(seofp_multiply(a, b).word == to_word(native(to_word(-0.8765f), to_word(-0.125f))));

  CHECK(seofp_multiply(a, adjust_parameter(0u)).word == 0u);
  CHECK(seofp_multiply(adjust_input(0x80000000u), b).word == 0u);
  CHECK(seofp_multiply(AdjustedInput{0x80000000u}, AdjustedParam{0x80000000u}).word == 0u);

  SUBCASE("sign truth table") {
    const float mags[2] = {0.75f, 0.5f};
    const int expected[2][2] = {{0, 1}, {1, 0}};
    for (int sa = 0; sa < 2; ++sa)
      for (int sb = 0; sb < 2; ++sb) {
        const float x = sa ? -mags[0] : mags[0];
        const float p = sb ? -mags[1] : mags[1];
        const std::uint32_t w = seofp_multiply(adjust_input(to_word(x)), adjust_parameter(to_word(p))).word;
        CHECK(static_cast<int>(w >> 31) == expected[sa][sb]);
        CHECK(from_word(w) == x * p);
      }
  }
}

TEST_CASE("integer-add product equals both multipliers over every legal parameter") {
  std::mt19937 rng(13);
  std::vector<std::uint32_t> inputs;
  for (int i = 0; i < 3000; ++i) inputs.push_back(random_input(rng));
  inputs.push_back(to_word(1.0f));
  inputs.push_back(to_word(-1.0f));
  for (std::uint32_t sign = 0; sign < 2; ++sign)
    for (std::uint32_t e = kParamShift + 1; e <= 127; ++e) {
      const std::uint32_t p = sign << 31 | e << 23;
      const AdjustedParam pa = adjust_parameter(p);
      for (std::uint32_t x : inputs) {
        const AdjustedInput xa = adjust_input(x);
        REQUIRE((xa.word & kMagnitudeMask) + (pa.word & kMagnitudeMask) <= kMagnitudeMask);
        const std::uint32_t w = seofp_multiply(xa, pa).word;
        REQUIRE(w == reference_multiply(x, p).word);
        REQUIRE(w == to_word(native(x, p)));
        REQUIRE((w >> 31) == ((x ^ p) >> 31));
      }
    }
}

TEST_CASE("reference product applies the flush rule") {
  FlushStats stats;
  CHECK(reference_product(to_word(0x1p-63f), to_word(0.5f), &stats).word == 0u);
  CHECK(stats.inputs == 1);
  CHECK(reference_product(to_word(0.5f), to_word(0x1p-64f), &stats).word == 0u);
  CHECK(stats.params == 1);
  CHECK(reference_product(to_word(0.5f), to_word(0.5f), &stats).value() == 0.25f);
  CHECK(reference_product(0u, to_word(0.5f), &stats).word == 0u);
  CHECK(stats.total() == 2);
  CHECK(reference_product(5u, to_word(0.5f), &stats).word == 0u);  // subnormal input flushes
  CHECK(stats.inputs == 2);
  CHECK_THROWS_AS(reference_product(0x7FC00000u, to_word(0.5f)), FloatFormatError);
}

TEST_CASE("mac_row") {
  CHECK(mac_row({}, {}) == 0.0f);
  const AdjustedInput a = adjust_input(to_word(-0.8765f));
  const AdjustedParam b = adjust_parameter(to_word(-0.125f));
  CHECK(to_word(mac_row(std::vector{a}, std::vector{b})) == to_word(0.1095625f));

  std::mt19937 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AdjustedInput> xs;
    std::vector<AdjustedParam> ps;
    float expect = 0.0f;
    for (int i = 0; i < 16; ++i) {
      const std::uint32_t x = random_input(rng);
      const std::uint32_t p = (rng() & 1u) << 31 | (100 + rng() % 28) << 23;
      xs.push_back(adjust_input(x));
      ps.push_back(adjust_parameter(p));
      expect += native(x, p);
    }
    REQUIRE(to_word(mac_row(xs, ps)) == to_word(expect));
  }
  CHECK_THROWS_AS(mac_row(std::vector{a, a}, std::vector{b}), std::invalid_argument);
}
