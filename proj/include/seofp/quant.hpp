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

#ifndef SEOFP_QUANT_HPP_
#define SEOFP_QUANT_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "seofp/bitcore.hpp"
#include "seofp/model.hpp"

namespace seofp {

/// Retained bit-width x in [9, 32] and its mask: the head x bits set, the trailing 32 - x clear.
class QuantSpec {
 public:
  static constexpr int kMinBits = 9;
  static constexpr int kMaxBits = 32;

  /// Throws std::out_of_range for bit-widths outside [9, 32].
  explicit QuantSpec(int bits);

  int bits() const noexcept { return bits_; }
  std::uint32_t kernel() const noexcept { return kernel_; }

 private:
  int bits_;
  std::uint32_t kernel_;
};

/// Rounding-like fraction quantization of one parameter word.
///
/// For 9 < x < 32 the first discarded bit is ORed into the lowest kept bit before masking,
/// which never carries into the exponent. For x == 9 the leading fraction bit is added to the
/// exponent field (round half up on the significand) and the whole fraction is cleared. x == 32 is
/// the identity. Throws FloatFormatError for subnormal, infinite and NaN words and
/// std::overflow_error if x == 9 rounding would carry the largest finite exponent into infinity.
std::uint32_t fraction_quantize(std::uint32_t word, QuantSpec spec);

/// Baseline: clears the trailing 32 - x bits with no rounding.
std::uint32_t direct_remove(std::uint32_t word, QuantSpec spec);

inline float fraction_quantize(float value, QuantSpec spec) {
  return from_word(fraction_quantize(to_word(value), spec));
}

/// A parameter-level failure annotated with where in the model it happened.
class ParameterError : public std::runtime_error {
 public:
  ParameterError(std::size_t layer, std::size_t index, const std::string& what);
  std::size_t layer() const noexcept { return layer_; }
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t layer_;
  std::size_t index_;
};

/// Applies fraction_quantize to every weight and bias. Sigma is left untouched.
Model fraction_quantize_model(const Model& model, QuantSpec spec);

/// Applies direct_remove to every weight and bias.
Model direct_remove_model(const Model& model, QuantSpec spec);

/// Exponent codebook for sign-exponent-only parameters.
///
/// Nonzero exponents E in [min_exp, max_exp] map to E - min_exp + 1; code 0 is zero. A parameter
/// is stored as its sign bit followed by `width` code bits.
struct ExponentCodebook {
  int max_exp = 0;
  int min_exp = 0;
  int width = 1;

  /// Builds the codebook covering a set of zero-fraction words. Throws std::invalid_argument on an
  /// empty set or a word with a nonzero fraction. A set holding only zeros gets
  /// max_exp == min_exp == 0.
  static ExponentCodebook covering(const std::vector<std::uint32_t>& words);

  int bits_per_parameter() const noexcept { return width + 1; }

  /// 0 for zero, E - min_exp + 1 otherwise.
  std::uint32_t exponent_code(std::uint32_t word) const;
  /// Sign bit above the exponent code: (sign << width) | exponent_code.
  std::uint32_t encode(std::uint32_t word) const;
  /// Inverse of encode. Throws std::out_of_range for codes outside the codebook.
  std::uint32_t decode(std::uint32_t code) const;

  friend bool operator==(const ExponentCodebook&, const ExponentCodebook&) = default;
};

/// ceil(log2(levels + 1)) for `levels` nonzero exponent values plus the zero code.
int codebook_width(int levels);

struct CodedLayer {
  std::vector<std::uint32_t> weights;
  std::vector<std::uint32_t> bias;
};

struct ExponentQuantized {
  ExponentCodebook codebook;
  std::vector<CodedLayer> layers;
};

/// Post-training exponent quantization. Requires every parameter to have a zero fraction and
/// the model to hold at least one parameter.
ExponentQuantized exponent_quantize(const Model& model);

/// Rebuilds parameter words from codes. `layout` supplies layer specs and sigmas.
Model exponent_restore(const ExponentQuantized& coded, const Model& layout);

struct ExponentHistogram {
  std::map<int, std::size_t> counts;  // unbiased exponent -> parameter count
  std::size_t zeros = 0;

  std::size_t total() const noexcept;
};

/// Counts parameters per log2-magnitude bucket, zeros separately.
ExponentHistogram exponent_histogram(const Model& model);

}  // namespace seofp

#endif  // SEOFP_QUANT_HPP_
