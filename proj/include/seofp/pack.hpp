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

#ifndef SEOFP_PACK_HPP_
#define SEOFP_PACK_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seofp/model.hpp"

namespace seofp {

// .seofp layout, little-endian integers:
//
//   "SEOF"  u8 version  u32 layer_count
//   per layer:  u8 kind  u8 activation  u32 inputs  u32 outputs  u32 kernel  u32 sigma_word
//   per tensor (each layer's weights, then its biases):
//     u8 encoding  [codebook only: u8 width  i32 min_exp]  payload
//
// A payload holds one code per parameter, most significant bit first, padded with zero bits to a
// byte boundary: the full word (full32), its top 9 bits (sign_exponent9) or the sign bit followed
// by the exponent code (codebook).

inline constexpr char kPackMagic[4] = {'S', 'E', 'O', 'F'};
inline constexpr std::uint8_t kPackVersion = 1;

enum class Encoding : std::uint8_t { full32 = 0, sign_exponent9 = 1, codebook = 2 };

const char* to_string(Encoding encoding) noexcept;
/// Accepts "full32", "se9" / "sign-exponent-9" and "codebook".
Encoding parse_encoding(const std::string& name);

enum class PackErrc {
  bad_magic,
  unsupported_version,
  corrupt_header,
  truncated,
  corrupt_payload,
  trailing_data,
  encoding_mismatch,
};

class PackError : public std::runtime_error {
 public:
  PackError(PackErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  PackErrc code() const noexcept { return code_; }

 private:
  PackErrc code_;
};

struct PackedSize {
  std::size_t header_bytes = 0;   // magic, version, layer table and tensor headers
  std::size_t payload_bytes = 0;  // sum over tensors of ceil(count * bits / 8)
  std::size_t payload_bits = 0;   // sum over tensors of count * bits

  std::size_t total() const noexcept { return header_bytes + payload_bytes; }
};

/// Size pack() would produce, from the layout rules alone. Checks encoding preconditions.
PackedSize packed_size(const Model& model, Encoding encoding);

/// Serializes a model. sign_exponent9 and codebook require every parameter to have a zero
/// fraction (PackError::encoding_mismatch otherwise); codebook uses one model-wide codebook.
std::vector<std::uint8_t> pack(const Model& model, Encoding encoding);

/// Exact inverse of pack. Each malformation raises a PackError with its own code.
Model unpack(std::span<const std::uint8_t> bytes);

/// Signed size change from baseline in percent; negative means smaller.
/// Throws std::invalid_argument unless baseline_size > 0.
double compression_ratio(double packed_size, double baseline_size);

void write_packed(const std::filesystem::path& path, const Model& model, Encoding encoding);
Model read_packed(const std::filesystem::path& path);

}  // namespace seofp

#endif  // SEOFP_PACK_HPP_
