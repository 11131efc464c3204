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

#ifndef SEOFP_BITCORE_HPP_
#define SEOFP_BITCORE_HPP_

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace seofp {

inline constexpr int kExponentBias = 127;
inline constexpr int kFractionBits = 23;
inline constexpr std::uint32_t kSignMask = 0x80000000u;
inline constexpr std::uint32_t kExponentMask = 0x7F800000u;
inline constexpr std::uint32_t kFractionMask = 0x007FFFFFu;
inline constexpr std::uint32_t kMagnitudeMask = 0x7FFFFFFFu;

constexpr std::uint32_t to_word(float value) noexcept { return std::bit_cast<std::uint32_t>(value); }
constexpr float from_word(std::uint32_t word) noexcept { return std::bit_cast<float>(word); }

/// A single-precision word viewed as its sign, biased exponent and fraction fields.
struct FloatBits {
  std::uint32_t sign = 0;      // bit 31
  std::uint32_t exponent = 0;  // bits 30..23
  std::uint32_t fraction = 0;  // bits 22..0

  friend constexpr bool operator==(const FloatBits&, const FloatBits&) = default;
};

constexpr FloatBits split(std::uint32_t word) noexcept {
  return FloatBits{word >> 31, (word & kExponentMask) >> kFractionBits, word & kFractionMask};
}

constexpr std::uint32_t join(const FloatBits& bits) noexcept {
  return (bits.sign & 1u) << 31 | (bits.exponent & 0xFFu) << kFractionBits | (bits.fraction & kFractionMask);
}

enum class WordClass { zero, normal, subnormal, infinite, nan };

constexpr WordClass classify(std::uint32_t word) noexcept {
  const FloatBits b = split(word);
  if (b.exponent == 0xFF) return b.fraction == 0 ? WordClass::infinite : WordClass::nan;
  if (b.exponent == 0) return b.fraction == 0 ? WordClass::zero : WordClass::subnormal;
  return WordClass::normal;
}

const char* to_string(WordClass cls) noexcept;

/// Raised when a word falls outside the normal-or-zero domain every module works in.
class FloatFormatError : public std::domain_error {
 public:
  FloatFormatError(WordClass kind, std::uint32_t word);
  WordClass kind() const noexcept { return kind_; }
  std::uint32_t word() const noexcept { return word_; }

 private:
  WordClass kind_;
  std::uint32_t word_;
};

/// Throws FloatFormatError unless `word` is a normal number or a signed zero.
void require_normal_or_zero(std::uint32_t word);

/// True iff the exponent and fraction bits are all zero; the sign is ignored.
constexpr bool is_zero_pattern(std::uint32_t word) noexcept { return (word & kMagnitudeMask) == 0; }
constexpr bool is_zero_pattern(const FloatBits& bits) noexcept { return bits.exponent == 0 && bits.fraction == 0; }

/// -0 becomes +0; every other word is returned unchanged.
constexpr std::uint32_t canonical_zero(std::uint32_t word) noexcept { return is_zero_pattern(word) ? 0u : word; }

constexpr int unbiased_exponent(std::uint32_t word) noexcept {
  return static_cast<int>(split(word).exponent) - kExponentBias;
}

struct ValueParts {
  int sign_factor = 1;       // +1 or -1
  double significand = 1.0;  // 1 + sum(bit[i] * 2^(i-23)), in [1, 2)
  int unbiased_exponent = 0;
};

/// Field-wise valuation of a normal word. Rejects zero as well, which has no significand.
ValueParts value_parts(const FloatBits& bits);

/// Decimal value of a normal or zero word: (-1)^sign * significand * 2^(exponent - 127).
double decode_value(const FloatBits& bits);
inline double decode_value(std::uint32_t word) { return decode_value(split(word)); }

}  // namespace seofp

#endif  // SEOFP_BITCORE_HPP_
