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

#include "seofp/bitcore.hpp"

#include <cmath>
#include <cstdio>

namespace seofp {

namespace {

std::string describe(WordClass kind, std::uint32_t word) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "word 0x%08X is %s; only normal numbers and zero are supported", word,
                to_string(kind));
  return buf;
}

}  // namespace

const char* to_string(WordClass cls) noexcept {
  switch (cls) {
    case WordClass::zero: return "zero";
    case WordClass::normal: return "normal";
    case WordClass::subnormal: return "subnormal";
    case WordClass::infinite: return "infinite";
    case WordClass::nan: return "NaN";
  }
  return "unknown";
}

FloatFormatError::FloatFormatError(WordClass kind, std::uint32_t word)
    : std::domain_error(describe(kind, word)), kind_(kind), word_(word) {}

void require_normal_or_zero(std::uint32_t word) {
  const WordClass cls = classify(word);
  if (cls != WordClass::normal && cls != WordClass::zero) throw FloatFormatError(cls, word);
}

ValueParts value_parts(const FloatBits& bits) {
  const std::uint32_t word = join(bits);
  const WordClass cls = classify(word);
  if (cls != WordClass::normal) throw FloatFormatError(cls, word);

  ValueParts parts;
  parts.sign_factor = bits.sign ? -1 : 1;
  parts.significand = 1.0;
  for (int i = 0; i < kFractionBits; ++i) {
    if (bits.fraction >> i & 1u) parts.significand += std::ldexp(1.0, i - kFractionBits);
  }
  parts.unbiased_exponent = static_cast<int>(bits.exponent) - kExponentBias;
  return parts;
}

double decode_value(const FloatBits& bits) {
  if (is_zero_pattern(bits)) return bits.sign ? -0.0 : 0.0;
  const ValueParts parts = value_parts(bits);
  return parts.sign_factor * std::ldexp(parts.significand, parts.unbiased_exponent);
}

}  // namespace seofp
