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

#ifndef SEOFP_ARITH_HPP_
#define SEOFP_ARITH_HPP_

#include <cassert>
#include <cstdint>
#include <span>

#include "seofp/bitcore.hpp"

namespace seofp {

/// The exponent bias 127 split between the two multiplicands: inputs carry 64 of it, parameters 63.
inline constexpr int kInputShift = 64;
inline constexpr int kParamShift = 63;
static_assert(kInputShift + kParamShift == kExponentBias);

/// Parameter word with a zero fraction and an exponent pre-decremented by 63.
struct AdjustedParam {
  std::uint32_t word = 0;
};

/// Input word with an exponent pre-decremented by 64 and an untouched fraction.
struct AdjustedInput {
  std::uint32_t word = 0;
};

/// IEEE-754 word of a product.
struct ProductWord {
  std::uint32_t word = 0;
  float value() const noexcept { return from_word(word); }
};

/// Counts operands whose adjusted exponent would fall below 1 and were flushed to +0.
struct FlushStats {
  std::uint64_t inputs = 0;
  std::uint64_t params = 0;

  std::uint64_t total() const noexcept { return inputs + params; }
  FlushStats& operator+=(const FlushStats& other) noexcept {
    inputs += other.inputs;
    params += other.params;
    return *this;
  }
};

/// Software model of a single-precision multiplier: sign XOR, a 9-bit exponent sum minus the
/// bias, and a 24x24-bit significand product renormalized once if it reaches 2. The product
/// significand is truncated, which is exact whenever either operand has a zero fraction.
/// A zero operand gives +0. Throws std::overflow_error / std::underflow_error when the result
/// exponent leaves the normal range, and FloatFormatError for non-normal operands.
ProductWord reference_multiply(std::uint32_t a, std::uint32_t b);

/// reference_multiply under the flush rule the adjusted path applies: +0 when the input's
/// exponent is at most 64 or the parameter's at most 63.
ProductWord reference_product(std::uint32_t input, std::uint32_t param, FlushStats* stats = nullptr);

/// Divides a zero-fraction parameter with |p| <= 1 by 2^63 through its exponent field.
/// Throws std::invalid_argument for a nonzero fraction and std::domain_error for |p| > 1.
AdjustedParam adjust_parameter(std::uint32_t param, FlushStats* stats = nullptr);

/// Divides an input with |a| <= 1 by 2^64 through its exponent field.
/// Throws std::domain_error for |a| > 1.
AdjustedInput adjust_input(std::uint32_t input, FlushStats* stats = nullptr);

/// Normalizes by sigma = 2^sigma_log2 and applies the input adjustment in one exponent subtract,
/// i.e. divides by sigma * 2^64. Requires |input| <= sigma and sigma_log2 in [-63, 63].
AdjustedInput adjust_input(std::uint32_t input, int sigma_log2, FlushStats* stats = nullptr);

/// adjust_input(word, sigma_log2) over a whole activation buffer. Same errors, same flush counting.
void adjust_inputs(std::span<const float> inputs, int sigma_log2, std::span<AdjustedInput> out,
                   FlushStats* stats = nullptr);

/// One integer addition replaces the floating-point multiply. Either operand being a zero pattern
/// yields +0; otherwise the whole words are added and the carry out of bit 31 is dropped, which
/// makes the sign bits combine as XOR.
inline ProductWord seofp_multiply(AdjustedInput a, AdjustedParam b) noexcept {
  // Two ORs over bits 30..0 followed by a NAND; the result gates the sum to +0 without a branch.
  const std::uint32_t a_nonzero = (a.word & kMagnitudeMask) != 0;
  const std::uint32_t b_nonzero = (b.word & kMagnitudeMask) != 0;
  const std::uint32_t gate = 0u - (a_nonzero & b_nonzero);
  assert(!gate || (a.word & kMagnitudeMask) + (b.word & kMagnitudeMask) <= kMagnitudeMask);
  return ProductWord{(a.word + b.word) & gate};
}

/// Left-to-right float accumulation of seofp_multiply products starting from +0.
/// Throws std::invalid_argument when the spans differ in length.
float mac_row(std::span<const AdjustedInput> inputs, std::span<const AdjustedParam> params);

}  // namespace seofp

#endif  // SEOFP_ARITH_HPP_
