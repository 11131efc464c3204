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

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "seofp/quant.hpp"

using namespace seofp;

namespace {

constexpr std::uint32_t kPaperWord = 0x3DFCB924u;  // 0.1234f

// Value-domain oracle for 9 < x < 32: truncate |v| to k = x - 9 fraction bits, then force the
// lowest kept bit to 1 when the first dropped bit is 1.
double or_round_oracle(std::uint32_t word, int x) {
  const double v = static_cast<double>(from_word(word));
  if (v == 0.0) return v;
  const int k = x - 9;
  int e = 0;
  std::frexp(std::fabs(v), &e);  // |v| = m * 2^e, m in [0.5, 1)
  const double ulp = std::ldexp(1.0, e - 1 - k);
  const double scaled = std::fabs(v) / ulp;
  double kept = std::floor(scaled);
  if (scaled - kept >= 0.5 && std::fmod(kept, 2.0) == 0.0) kept += 1.0;
  return std::copysign(kept * ulp, v);
}

// Value-domain oracle for x == 9: nearest power of two, ties (significand exactly 1.5) upward.
double pow2_round_oracle(std::uint32_t word) {
  const double v = static_cast<double>(from_word(word));
  if (v == 0.0) return v;
  int e = 0;
  const double m = std::frexp(std::fabs(v), &e) * 2.0;  // [1, 2)
  return std::copysign(std::ldexp(1.0, m >= 1.5 ? e : e - 1), v);
}

std::uint32_t random_normal_word(std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> exp(1, 253);
  return (rng() & 1u) << 31 | exp(rng) << 23 | (rng() & kFractionMask);
}

Model single_layer_model(std::vector<float> weights, std::vector<float> bias = {}) {
  if (bias.empty()) bias = {0.0f};
  Model m = make_zero_model({LayerSpec::dense(static_cast<int>(weights.size()), static_cast<int>(bias.size()))});
  m.layers[0].weights = std::move(weights);
  m.layers[0].bias = std::move(bias);
  return m;
}

}  // namespace

TEST_CASE("QuantSpec kernel") {
  CHECK(QuantSpec(32).kernel() == 0xFFFFFFFFu);
  CHECK(QuantSpec(9).kernel() == 0xFF800000u);
  CHECK(QuantSpec(26).kernel() == 0xFFFFFFC0u);
  for (int x = 9; x <= 32; ++x) {
    const std::uint32_t k = QuantSpec(x).kernel();
    CHECK(std::popcount(k) == x);
    CHECK(std::countl_one(k) == x);
  }
  CHECK_THROWS_AS(QuantSpec(8), std::out_of_range);
  CHECK_THROWS_AS(QuantSpec(33), std::out_of_range);
  CHECK_THROWS_AS(QuantSpec(0), std::out_of_range);
}

TEST_CASE("direct_remove of 0.1234") {
  CHECK(decode_value(direct_remove(kPaperWord, QuantSpec(26))) == doctest::Approx(0.123399734497).epsilon(1e-11));
  CHECK(decode_value(direct_remove(kPaperWord, QuantSpec(20))) == doctest::Approx(0.123382568359).epsilon(1e-11));
  CHECK(direct_remove(kPaperWord, QuantSpec(26)) == 0x3DFCB900u);
  CHECK(direct_remove(kPaperWord, QuantSpec(32)) == kPaperWord);
}

TEST_CASE("fraction_quantize of 0.1234") {
  CHECK(from_word(fraction_quantize(kPaperWord, QuantSpec(9))) == 0.125f);
  CHECK(fraction_quantize(to_word(0.125f), QuantSpec(9)) == to_word(0.125f));
  // Bit 5 (the first dropped bit at x=26) is 1, so bit 6 is forced on.
  const std::uint32_t q26 = fraction_quantize(kPaperWord, QuantSpec(26));
  CHECK((kPaperWord >> 5 & 1u) == 1u);
  CHECK(q26 == 0x3DFCB940u);
  CHECK((q26 & 0x3Fu) == 0u);
  CHECK(fraction_quantize(kPaperWord, QuantSpec(32)) == kPaperWord);
  CHECK(fraction_quantize(0.1234f, QuantSpec(9)) == 0.125f);
}

TEST_CASE("fraction_quantize matches the value-domain oracles") {
  std::mt19937 rng(17);
  for (int i = 0; i < 200000; ++i) {
    const std::uint32_t w = random_normal_word(rng);
    const int x = 9 + static_cast<int>(rng() % 23);
    const std::uint32_t q = fraction_quantize(w, QuantSpec(x));
    const double expect = x == 9 ? pow2_round_oracle(w) : or_round_oracle(w, x);
    REQUIRE(static_cast<double>(from_word(q)) == expect);
    REQUIRE((q & ~QuantSpec(x).kernel()) == 0u);
  }
}

TEST_CASE("x=9 relative error stays within 1/3 over every fraction") {
  // Exhaustive over the 2^23 fractions of one exponent; every exponent behaves identically.
  const std::uint32_t base = 126u << 23;
  double worst = 0.0;
  for (std::uint32_t f = 0; f <= kFractionMask; ++f) {
    const std::uint32_t w = base | f;
    const double v = static_cast<double>(from_word(w));
    const double q = static_cast<double>(from_word(fraction_quantize(w, QuantSpec(9))));
    const double rel = std::fabs(q - v) / v;
    if (rel > worst) worst = rel;
  }
  CHECK(worst <= 1.0 / 3.0);
  CHECK(worst > 0.33);
}

TEST_CASE("rounding bound for x > 9") {
  std::mt19937 rng(23);
  for (int i = 0; i < 100000; ++i) {
    const std::uint32_t w = random_normal_word(rng);
    const int x = 10 + static_cast<int>(rng() % 23);
    const double v = static_cast<double>(from_word(w));
    const double q = static_cast<double>(from_word(fraction_quantize(w, QuantSpec(x))));
    REQUIRE(std::fabs(q - v) <= std::fabs(v) * std::ldexp(1.0, -(x - 9)));
  }
}

TEST_CASE("sign bit is never changed") {
  std::mt19937 rng(29);
  for (int i = 0; i < 100000; ++i) {
    const std::uint32_t w = random_normal_word(rng);
    for (int x : {9, 10, 20, 31, 32}) REQUIRE((fraction_quantize(w, QuantSpec(x)) >> 31) == (w >> 31));
  }
  // Largest exponent that can still carry without reaching infinity.
  const std::uint32_t top = 0xFF7FFFFFu;  // -max float, exponent 254
  CHECK_THROWS_AS(fraction_quantize(top, QuantSpec(9)), std::overflow_error);
  CHECK(fraction_quantize(0xBF400000u, QuantSpec(9)) == 0xBF800000u);  // -0.75 -> -1
}

TEST_CASE("direct_remove composes monotonically") {
  std::mt19937 rng(31);
  for (int i = 0; i < 50000; ++i) {
    const std::uint32_t w = random_normal_word(rng);
    const int x1 = 9 + static_cast<int>(rng() % 24);
    const int x2 = x1 + static_cast<int>(rng() % (33 - x1));
    REQUIRE(direct_remove(direct_remove(w, QuantSpec(x2)), QuantSpec(x1)) == direct_remove(w, QuantSpec(x1)));
  }
}

TEST_CASE("zero and invalid words") {
  for (int x : {9, 17, 32}) {
    CHECK(fraction_quantize(0u, QuantSpec(x)) == 0u);
    CHECK(fraction_quantize(0x80000000u, QuantSpec(x)) == 0x80000000u);
    CHECK(direct_remove(0u, QuantSpec(x)) == 0u);
  }
  for (std::uint32_t bad : {0x7F800000u, 0x7FC00000u, 0x00000001u}) {
    CHECK_THROWS_AS(fraction_quantize(bad, QuantSpec(9)), FloatFormatError);
    CHECK_THROWS_AS(direct_remove(bad, QuantSpec(20)), FloatFormatError);
  }
}

TEST_CASE("model-level quantization") {
  SUBCASE("all-zero model is a fixed point") {
    const Model z = make_zero_model({LayerSpec::dense(4, 3), LayerSpec::conv1d(1, 2, 3)});
    for (int x : {9, 20, 32}) CHECK(words_identical(fraction_quantize_model(z, QuantSpec(x)), z));
  }
  SUBCASE("single parameter") {
    const Model m = single_layer_model({0.1234f});
    CHECK(fraction_quantize_model(m, QuantSpec(9)).layers[0].weights[0] == 0.125f);
  }
  SUBCASE("random model at x=9 has no fractions and keeps shapes") {
    Model m = make_zero_model({LayerSpec::dense(9, 10)});
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    m.for_each_parameter([&](float& v) { v = u(rng); });
    const Model q = fraction_quantize_model(m, QuantSpec(9));
    CHECK(q.parameter_count() == 100);
    CHECK(q.layers[0].spec == m.layers[0].spec);
    q.for_each_parameter([](float v) { REQUIRE(split(to_word(v)).fraction == 0u); });
  }
  SUBCASE("errors carry layer and index") {
    Model m = make_zero_model({LayerSpec::dense(2, 1), LayerSpec::dense(1, 2)});
    m.layers[1].weights[1] = from_word(0x7F800000u);
    try {
      (void)fraction_quantize_model(m, QuantSpec(9));
      FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
      CHECK(e.layer() == 1);
      CHECK(e.index() == 1);
    }
    CHECK_THROWS_AS(direct_remove_model(m, QuantSpec(9)), ParameterError);
  }
}

TEST_CASE("codebook width") {
  CHECK(codebook_width(1) == 1);
  CHECK(codebook_width(2) == 2);
  CHECK(codebook_width(3) == 2);
  CHECK(codebook_width(14) == 4);
  CHECK(codebook_width(24) == 5);
  CHECK(codebook_width(31) == 5);
  CHECK(codebook_width(32) == 6);
  CHECK(codebook_width(37) == 6);
  for (int levels = 1; levels < 300; ++levels)
    CHECK(codebook_width(levels) == static_cast<int>(std::ceil(std::log2(levels + 1.0))));
}

TEST_CASE("exponent_quantize on the set {0, +-2^-11 .. +-2^2}") {
  std::vector<float> values = {0.0f, -0.0f};
  for (int e = -11; e <= 2; ++e) {
    values.push_back(std::ldexp(1.0f, e));
    values.push_back(-std::ldexp(1.0f, e));
  }
  const Model m = single_layer_model(values);
  const ExponentQuantized q = exponent_quantize(m);
  CHECK(q.codebook.width == 4);
  CHECK(q.codebook.bits_per_parameter() == 5);
  CHECK(q.codebook.min_exp == -11);
  CHECK(q.codebook.max_exp == 2);
  CHECK(q.codebook.exponent_code(to_word(0.0f)) == 0u);
  CHECK(q.codebook.exponent_code(to_word(-0.0f)) == 0u);
  CHECK(q.codebook.exponent_code(to_word(std::ldexp(1.0f, -11))) == 1u);
  CHECK(q.codebook.exponent_code(to_word(-std::ldexp(1.0f, -11))) == 1u);
  CHECK(q.codebook.exponent_code(to_word(2.0f)) == 13u);
  CHECK(q.codebook.exponent_code(to_word(-2.0f)) == 13u);
  CHECK(q.codebook.encode(to_word(-2.0f)) == (1u << 4 | 13u));
  CHECK(words_identical(exponent_restore(q, m), m));
}

TEST_CASE("exponent_quantize widths for wider spans") {
  auto width_for = [](int lo, int hi) {
    return exponent_quantize(single_layer_model({std::ldexp(1.0f, lo), std::ldexp(1.0f, hi)})).codebook.width;
  };
  CHECK(width_for(-23, 0) == 5);
  CHECK(width_for(-26, 10) == 6);
  const ExponentQuantized half = exponent_quantize(single_layer_model({0.5f}));
  CHECK(half.codebook.width == 1);
  CHECK(half.codebook.min_exp == -1);
  CHECK(half.codebook.exponent_code(to_word(0.5f)) == 1u);
}

TEST_CASE("exponent codec round trip and errors") {
  Model m = make_zero_model({LayerSpec::conv1d(2, 3, 5), LayerSpec::dense(3, 4)});
  std::mt19937 rng(41);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  m.for_each_parameter([&](float& v) { v = u(rng); });
  m.layers[0].weights[3] = 0.0f;
  m.layers[1].bias[2] = -0.0f;
  m = fraction_quantize_model(m, QuantSpec(9));
  const ExponentQuantized q = exponent_quantize(m);
  for (const CodedLayer& layer : q.layers)
    for (std::uint32_t c : layer.weights) CHECK(c < (2u << q.codebook.width));
  CHECK(words_identical(exponent_restore(q, m), m));

  CHECK_THROWS_AS(exponent_quantize(single_layer_model({0.3f})), ParameterError);
  CHECK_THROWS_AS(exponent_quantize(Model{}), std::invalid_argument);
  CHECK_THROWS_AS(q.codebook.decode(1u << (q.codebook.width + 1)), std::out_of_range);
  CHECK_THROWS_AS(q.codebook.exponent_code(to_word(std::ldexp(1.0f, q.codebook.max_exp + 1))), std::out_of_range);
}

TEST_CASE("exponent histogram") {
  const ExponentHistogram h = exponent_histogram(single_layer_model({0.5f, 0.5f, 0.25f}));
  CHECK(h.counts.size() == 2);
  CHECK(h.counts.at(-1) == 2);
  CHECK(h.counts.at(-2) == 1);
  CHECK(h.zeros == 1);  // the bias
  const Model z = make_zero_model({LayerSpec::dense(5, 2)});
  const ExponentHistogram hz = exponent_histogram(z);
  CHECK(hz.counts.empty());
  CHECK(hz.zeros == 12);
  CHECK(hz.total() == 12);
}
