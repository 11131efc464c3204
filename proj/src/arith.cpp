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

#include "seofp/arith.hpp"

#include <stdexcept>
#include <string>

namespace seofp {

namespace {

// Biased exponent of 1.0; |v| <= 1 iff the word is at most this with a zero fraction.
constexpr std::uint32_t kOneWord = 0x3F800000u;

bool magnitude_at_most_one(std::uint32_t word) { return (word & kMagnitudeMask) <= kOneWord; }

}  // namespace

ProductWord reference_multiply(std::uint32_t a, std::uint32_t b) {
  require_normal_or_zero(a);
  require_normal_or_zero(b);
  if (is_zero_pattern(a) || is_zero_pattern(b)) return ProductWord{0u};

  const FloatBits fa = split(a);
  const FloatBits fb = split(b);
  const std::uint32_t sign = fa.sign ^ fb.sign;

  // 9-bit temporary exponent sum, then the bias.
  const std::uint32_t exp_sum = fa.exponent + fb.exponent;
  int exponent = static_cast<int>(exp_sum) - kExponentBias;

  // 24-bit significands with the hidden one; their product lies in [2^46, 2^48).
  const std::uint64_t sig_a = (std::uint64_t{1} << kFractionBits) | fa.fraction;
  const std::uint64_t sig_b = (std::uint64_t{1} << kFractionBits) | fb.fraction;
  std::uint64_t product = sig_a * sig_b;
  if (product >> 47) {
    product >>= 1;
    ++exponent;
  }
  const std::uint32_t fraction = static_cast<std::uint32_t>(product >> kFractionBits) & kFractionMask;

  if (exponent >= 0xFF) throw std::overflow_error("product exponent overflows single precision");
  if (exponent <= 0) throw std::underflow_error("product exponent underflows the normal range");
  return ProductWord{join({sign, static_cast<std::uint32_t>(exponent), fraction})};
}

ProductWord reference_product(std::uint32_t input, std::uint32_t param, FlushStats* stats) {
  // Subnormal operands fall under the flush rule rather than being rejected.
  for (std::uint32_t w : {input, param}) {
    const WordClass cls = classify(w);
    if (cls == WordClass::infinite || cls == WordClass::nan) throw FloatFormatError(cls, w);
  }
  if (is_zero_pattern(input) || is_zero_pattern(param)) return ProductWord{0u};
  bool flushed = false;
  if (split(input).exponent <= static_cast<std::uint32_t>(kInputShift)) {
    flushed = true;
    if (stats) ++stats->inputs;
  }
  if (split(param).exponent <= static_cast<std::uint32_t>(kParamShift)) {
    flushed = true;
    if (stats) ++stats->params;
  }
  if (flushed) return ProductWord{0u};
  return reference_multiply(input, param);
}

AdjustedParam adjust_parameter(std::uint32_t param, FlushStats* stats) {
  require_normal_or_zero(param);
  if (is_zero_pattern(param)) return AdjustedParam{0u};
  if ((param & kFractionMask) != 0) {
    throw std::invalid_argument("parameter adjustment requires a zero fraction");
  }
  if (!magnitude_at_most_one(param)) throw std::domain_error("parameter magnitude exceeds 1");
  if (split(param).exponent <= static_cast<std::uint32_t>(kParamShift)) {
    if (stats) ++stats->params;
    return AdjustedParam{0u};
  }
  return AdjustedParam{param - (static_cast<std::uint32_t>(kParamShift) << kFractionBits)};
}

AdjustedInput adjust_input(std::uint32_t input, FlushStats* stats) { return adjust_input(input, 0, stats); }

AdjustedInput adjust_input(std::uint32_t input, int sigma_log2, FlushStats* stats) {
  if (sigma_log2 < -63 || sigma_log2 > 63) {
    throw std::out_of_range("normalization exponent " + std::to_string(sigma_log2) + " outside [-63, 63]");
  }
  require_normal_or_zero(input);
  if (is_zero_pattern(input)) return AdjustedInput{0u};
  const int exponent = static_cast<int>(split(input).exponent);
  const bool within = exponent - sigma_log2 < kExponentBias ||
                      (exponent - sigma_log2 == kExponentBias && (input & kFractionMask) == 0);
  if (!within) throw std::domain_error("normalized input magnitude exceeds 1");

  const int shift = kInputShift + sigma_log2;
  if (exponent <= shift) {
    if (stats) ++stats->inputs;
    return AdjustedInput{0u};
  }
  return AdjustedInput{input - (static_cast<std::uint32_t>(shift) << kFractionBits)};
}

void adjust_inputs(std::span<const float> inputs, int sigma_log2, std::span<AdjustedInput> out, FlushStats* stats) {
  if (inputs.size() != out.size()) throw std::invalid_argument("adjust_inputs: output size differs from input size");
  if (sigma_log2 < -63 || sigma_log2 > 63) {
    throw std::out_of_range("normalization exponent " + std::to_string(sigma_log2) + " outside [-63, 63]");
  }
  const std::uint32_t shift = static_cast<std::uint32_t>(kInputShift + sigma_log2);
  // Largest legal magnitude is sigma itself, i.e. exponent field 127 + sigma_log2 with no fraction.
  const std::uint32_t limit = (static_cast<std::uint32_t>(kExponentBias + sigma_log2)) << kFractionBits;
  const std::uint32_t floor = (shift + 1) << kFractionBits;
  std::size_t flushed = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::uint32_t word = to_word(inputs[i]);
    const std::uint32_t mag = word & kMagnitudeMask;
    if (mag > limit) return (void)adjust_input(word, sigma_log2, stats);  // throws the specific error
    if (mag < floor) {
      if (mag != 0 && (mag >> kFractionBits) == 0) require_normal_or_zero(word);
      flushed += mag != 0;
      out[i] = AdjustedInput{0u};
    } else {
      out[i] = AdjustedInput{word - (shift << kFractionBits)};
    }
  }
  if (stats) stats->inputs += flushed;
}

float mac_row(std::span<const AdjustedInput> inputs, std::span<const AdjustedParam> params) {
  if (inputs.size() != params.size()) {
    throw std::invalid_argument("mac_row length mismatch: " + std::to_string(inputs.size()) + " inputs, " +
                                std::to_string(params.size()) + " parameters");
  }
  float acc = 0.0f;
  for (std::size_t i = 0; i < inputs.size(); ++i) acc += seofp_multiply(inputs[i], params[i]).value();
  return acc;
}

}  // namespace seofp
