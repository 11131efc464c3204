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

#include "seofp/quant.hpp"

#include <bit>
#include <limits>

#include "seofp/bitcore.hpp"

namespace seofp {

namespace {

std::uint32_t kernel_for(int bits) {
  return bits == 32 ? 0xFFFFFFFFu : ~(0xFFFFFFFFu >> bits);
}

void require_quantizable(std::uint32_t word) { require_normal_or_zero(word); }

template <typename Fn>
Model map_parameters(const Model& model, Fn&& fn) {
  Model out = model;
  for (std::size_t li = 0; li < out.layers.size(); ++li) {
    Layer& layer = out.layers[li];
    std::size_t index = 0;
    auto apply = [&](std::vector<float>& values) {
      for (float& v : values) {
        try {
          v = from_word(fn(to_word(v)));
        } catch (const std::exception& e) {
          throw ParameterError(li, index, e.what());
        }
        ++index;
      }
    };
    apply(layer.weights);
    apply(layer.bias);
  }
  return out;
}

}  // namespace

QuantSpec::QuantSpec(int bits) : bits_(bits), kernel_(0) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw std::out_of_range("retained bit-width must be in [9, 32], got " + std::to_string(bits));
  }
  kernel_ = kernel_for(bits);
}

std::uint32_t fraction_quantize(std::uint32_t word, QuantSpec spec) {
  require_quantizable(word);
  const int x = spec.bits();
  if (x == 32) return word;
  if (x > 9) {
    const std::uint32_t first_dropped = word >> (31 - x) & 1u;
    word |= first_dropped << (32 - x);
  } else {
    // Carry of the leading fraction bit lands in the exponent field.
    const std::uint32_t lead = word >> 22 & 1u;
    if (lead && split(word).exponent == 0xFE) {
      throw std::overflow_error("rounding would carry the exponent into infinity");
    }
    word += lead << kFractionBits;
  }
  return word & spec.kernel();
}

std::uint32_t direct_remove(std::uint32_t word, QuantSpec spec) {
  require_quantizable(word);
  return word & spec.kernel();
}

ParameterError::ParameterError(std::size_t layer, std::size_t index, const std::string& what)
    : std::runtime_error("layer " + std::to_string(layer) + ", parameter " + std::to_string(index) + ": " + what),
      layer_(layer),
      index_(index) {}

Model fraction_quantize_model(const Model& model, QuantSpec spec) {
  return map_parameters(model, [spec](std::uint32_t w) { return fraction_quantize(w, spec); });
}

Model direct_remove_model(const Model& model, QuantSpec spec) {
  return map_parameters(model, [spec](std::uint32_t w) { return direct_remove(w, spec); });
}

int codebook_width(int levels) {
  if (levels < 0) throw std::invalid_argument("negative exponent level count");
  return std::bit_width(static_cast<unsigned>(levels));
}

ExponentCodebook ExponentCodebook::covering(const std::vector<std::uint32_t>& words) {
  if (words.empty()) throw std::invalid_argument("cannot build an exponent codebook for an empty model");
  int max_exp = std::numeric_limits<int>::min();
  int min_exp = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::uint32_t w = words[i];
    require_normal_or_zero(w);
    if (is_zero_pattern(w)) continue;
    if ((w & kFractionMask) != 0) {
      throw std::invalid_argument("parameter " + std::to_string(i) + " has a nonzero fraction");
    }
    const int e = unbiased_exponent(w);
    max_exp = std::max(max_exp, e);
    min_exp = std::min(min_exp, e);
  }
  if (min_exp > max_exp) max_exp = min_exp = 0;  // zeros only

  ExponentCodebook book;
  book.max_exp = max_exp;
  book.min_exp = min_exp;
  book.width = codebook_width(max_exp - min_exp + 1);
  return book;
}

std::uint32_t ExponentCodebook::exponent_code(std::uint32_t word) const {
  if (is_zero_pattern(word)) return 0;
  require_normal_or_zero(word);
  if ((word & kFractionMask) != 0) throw std::invalid_argument("exponent coding requires a zero fraction");
  const int e = unbiased_exponent(word);
  if (e < min_exp || e > max_exp) {
    throw std::out_of_range("exponent " + std::to_string(e) + " outside codebook [" + std::to_string(min_exp) + ", " +
                            std::to_string(max_exp) + "]");
  }
  return static_cast<std::uint32_t>(e - min_exp + 1);
}

std::uint32_t ExponentCodebook::encode(std::uint32_t word) const {
  return (word >> 31) << width | exponent_code(word);
}

std::uint32_t ExponentCodebook::decode(std::uint32_t code) const {
  if (code >> (width + 1) != 0) throw std::out_of_range("code wider than the codebook");
  const std::uint32_t sign = code >> width & 1u;
  const std::uint32_t offset = code & ((1u << width) - 1u);
  if (offset == 0) return sign << 31;
  const int e = static_cast<int>(offset) - 1 + min_exp;
  if (e > max_exp) throw std::out_of_range("exponent code " + std::to_string(offset) + " beyond the codebook maximum");
  const int biased = e + kExponentBias;
  if (biased < 1 || biased > 254) throw std::out_of_range("decoded exponent is not a normal exponent");
  return sign << 31 | static_cast<std::uint32_t>(biased) << kFractionBits;
}

ExponentQuantized exponent_quantize(const Model& model) {
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    std::size_t index = 0;
    auto check_all = [&](const std::vector<float>& values) {
      for (float v : values) {
        const std::uint32_t w = to_word(v);
        if (classify(w) != WordClass::zero && classify(w) != WordClass::normal)
          throw ParameterError(li, index, "parameter is not a normal number or zero");
        if (!is_zero_pattern(w) && (w & kFractionMask) != 0) throw ParameterError(li, index, "nonzero fraction");
        ++index;
      }
    };
    check_all(model.layers[li].weights);
    check_all(model.layers[li].bias);
  }
  ExponentQuantized out;
  out.codebook = ExponentCodebook::covering(parameter_words(model));
  out.layers.reserve(model.layers.size());
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const Layer& layer = model.layers[li];
    CodedLayer coded;
    std::size_t index = 0;
    auto encode_all = [&](const std::vector<float>& values, std::vector<std::uint32_t>& codes) {
      codes.reserve(values.size());
      for (float v : values) {
        try {
          codes.push_back(out.codebook.encode(to_word(v)));
        } catch (const std::exception& e) {
          throw ParameterError(li, index, e.what());
        }
        ++index;
      }
    };
    encode_all(layer.weights, coded.weights);
    encode_all(layer.bias, coded.bias);
    out.layers.push_back(std::move(coded));
  }
  return out;
}

Model exponent_restore(const ExponentQuantized& coded, const Model& layout) {
  if (coded.layers.size() != layout.layers.size()) throw std::invalid_argument("layer count mismatch");
  Model out = layout;
  for (std::size_t li = 0; li < out.layers.size(); ++li) {
    Layer& layer = out.layers[li];
    const CodedLayer& codes = coded.layers[li];
    if (codes.weights.size() != layer.weights.size() || codes.bias.size() != layer.bias.size()) {
      throw std::invalid_argument("tensor size mismatch in layer " + std::to_string(li));
    }
    for (std::size_t i = 0; i < codes.weights.size(); ++i) layer.weights[i] = from_word(coded.codebook.decode(codes.weights[i]));
    for (std::size_t i = 0; i < codes.bias.size(); ++i) layer.bias[i] = from_word(coded.codebook.decode(codes.bias[i]));
  }
  return out;
}

std::size_t ExponentHistogram::total() const noexcept {
  std::size_t n = zeros;
  for (const auto& [e, c] : counts) n += c;
  return n;
}

ExponentHistogram exponent_histogram(const Model& model) {
  ExponentHistogram hist;
  model.for_each_parameter([&](float v) {
    const std::uint32_t w = to_word(v);
    if (is_zero_pattern(w)) {
      ++hist.zeros;
    } else {
      ++hist.counts[unbiased_exponent(w)];
    }
  });
  return hist;
}

}  // namespace seofp
