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

#include "seofp/pack.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

#include "seofp/bitcore.hpp"
#include "seofp/quant.hpp"

namespace seofp {

namespace {

constexpr std::size_t kFileHeaderBytes = 4 + 1 + 4;
constexpr std::size_t kLayerRecordBytes = 1 + 1 + 4 + 4 + 4 + 4;
constexpr std::uint32_t kMaxDimension = 1u << 28;

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

  /// Appends `bits` low bits of `code`, most significant first.
  void bits(std::uint32_t code, int bits) {
    for (int b = bits - 1; b >= 0; --b) {
      acc_ = static_cast<std::uint8_t>(acc_ << 1 | (code >> b & 1u));
      if (++filled_ == 8) {
        bytes_.push_back(acc_);
        acc_ = 0;
        filled_ = 0;
      }
    }
  }
  void align() {
    if (filled_ == 0) return;
    bytes_.push_back(static_cast<std::uint8_t>(acc_ << (8 - filled_)));
    acc_ = 0;
    filled_ = 0;
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

  /// Reads `count` codes of `bits` bits from a byte-aligned payload.
  std::vector<std::uint32_t> codes(std::size_t count, int bits) {
    const std::size_t nbytes = (count * static_cast<std::size_t>(bits) + 7) / 8;
    need(nbytes);
    std::vector<std::uint32_t> out(count);
    std::size_t bitpos = pos_ * 8;
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t code = 0;
      for (int b = 0; b < bits; ++b, ++bitpos) code = code << 1 | (bytes_[bitpos / 8] >> (7 - bitpos % 8) & 1u);
      out[i] = code;
    }
    pos_ += nbytes;
    return out;
  }

  bool at_end() const noexcept { return pos_ == bytes_.size(); }
  std::size_t position() const noexcept { return pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw PackError(PackErrc::truncated, "input ends at byte " + std::to_string(bytes_.size()) + " but " +
                                               std::to_string(n) + " more bytes are needed at offset " +
                                               std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

int code_bits(Encoding encoding, const ExponentCodebook& book) {
  switch (encoding) {
    case Encoding::full32: return 32;
    case Encoding::sign_exponent9: return 9;
    case Encoding::codebook: return book.bits_per_parameter();
  }
  return 32;
}

std::size_t tensor_header_bytes(Encoding encoding) { return encoding == Encoding::codebook ? 1 + 1 + 4 : 1; }

/// Checks encoding preconditions and returns the model-wide codebook (meaningful for codebook only).
ExponentCodebook prepare(const Model& model, Encoding encoding) {
  const std::vector<std::uint32_t> words = parameter_words(model);
  for (std::uint32_t w : words) {
    const WordClass cls = classify(w);
    if (cls == WordClass::infinite || cls == WordClass::nan) {
      throw PackError(PackErrc::encoding_mismatch, "model contains a non-finite parameter");
    }
    if (encoding != Encoding::full32 && (w & kFractionMask) != 0) {
      throw PackError(PackErrc::encoding_mismatch,
                      std::string(to_string(encoding)) + " encoding requires zero fractions in every parameter");
    }
  }
  if (encoding != Encoding::codebook || words.empty()) return ExponentCodebook{};
  try {
    return ExponentCodebook::covering(words);
  } catch (const std::exception& e) {
    throw PackError(PackErrc::encoding_mismatch, e.what());
  }
}

std::uint32_t encode_word(std::uint32_t word, Encoding encoding, const ExponentCodebook& book) {
  switch (encoding) {
    case Encoding::full32: return word;
    case Encoding::sign_exponent9: return word >> kFractionBits;
    case Encoding::codebook: return book.encode(word);
  }
  return word;
}

}  // namespace

const char* to_string(Encoding encoding) noexcept {
  switch (encoding) {
    case Encoding::full32: return "full32";
    case Encoding::sign_exponent9: return "se9";
    case Encoding::codebook: return "codebook";
  }
  return "unknown";
}

Encoding parse_encoding(const std::string& name) {
  if (name == "full32") return Encoding::full32;
  if (name == "se9" || name == "sign-exponent-9") return Encoding::sign_exponent9;
  if (name == "codebook") return Encoding::codebook;
  throw std::invalid_argument("unknown encoding '" + name + "' (expected full32, se9 or codebook)");
}

PackedSize packed_size(const Model& model, Encoding encoding) {
  const ExponentCodebook book = prepare(model, encoding);
  const int bits = code_bits(encoding, book);
  PackedSize size;
  size.header_bytes = kFileHeaderBytes + kLayerRecordBytes * model.layers.size() +
                      2 * tensor_header_bytes(encoding) * model.layers.size();
  for (const Layer& layer : model.layers) {
    for (std::size_t n : {layer.weights.size(), layer.bias.size()}) {
      size.payload_bits += n * static_cast<std::size_t>(bits);
      size.payload_bytes += (n * static_cast<std::size_t>(bits) + 7) / 8;
    }
  }
  return size;
}

std::vector<std::uint8_t> pack(const Model& model, Encoding encoding) {
  const ExponentCodebook book = prepare(model, encoding);
  const int bits = code_bits(encoding, book);

  ByteWriter out;
  for (char c : kPackMagic) out.u8(static_cast<std::uint8_t>(c));
  out.u8(kPackVersion);
  out.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (const Layer& layer : model.layers) {
    out.u8(static_cast<std::uint8_t>(layer.spec.kind));
    out.u8(static_cast<std::uint8_t>(layer.spec.activation));
    out.u32(static_cast<std::uint32_t>(layer.spec.inputs));
    out.u32(static_cast<std::uint32_t>(layer.spec.outputs));
    out.u32(static_cast<std::uint32_t>(layer.spec.kernel));
    out.u32(to_word(layer.sigma));
  }
  for (const Layer& layer : model.layers) {
    for (const std::vector<float>* tensor : {&layer.weights, &layer.bias}) {
      out.u8(static_cast<std::uint8_t>(encoding));
      if (encoding == Encoding::codebook) {
        out.u8(static_cast<std::uint8_t>(book.width));
        out.i32(book.min_exp);
      }
      for (float v : *tensor) out.bits(encode_word(to_word(v), encoding, book), bits);
      out.align();
    }
  }
  return out.take();
}

Model unpack(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < 4) throw PackError(PackErrc::truncated, "input shorter than the magic number");
  for (char c : kPackMagic) {
    if (in.u8() != static_cast<std::uint8_t>(c)) throw PackError(PackErrc::bad_magic, "not a .seofp stream");
  }
  const std::uint8_t version = in.u8();
  if (version != kPackVersion) {
    throw PackError(PackErrc::unsupported_version, "unsupported .seofp version " + std::to_string(version));
  }

  const std::uint32_t layer_count = in.u32();
  if (layer_count > (bytes.size() / kLayerRecordBytes)) {
    throw PackError(PackErrc::truncated, "layer table of " + std::to_string(layer_count) + " layers runs past the input");
  }
  std::vector<LayerSpec> specs;
  std::vector<float> sigmas;
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint8_t kind = in.u8();
    const std::uint8_t act = in.u8();
    const std::uint32_t inputs = in.u32();
    const std::uint32_t outputs = in.u32();
    const std::uint32_t kernel = in.u32();
    const std::uint32_t sigma = in.u32();
    const std::string where = "layer " + std::to_string(i) + ": ";
    if (kind > 1) throw PackError(PackErrc::corrupt_header, where + "unknown layer kind " + std::to_string(kind));
    if (act > 1) throw PackError(PackErrc::corrupt_header, where + "unknown activation " + std::to_string(act));
    for (std::uint32_t d : {inputs, outputs, kernel}) {
      if (d == 0 || d > kMaxDimension) throw PackError(PackErrc::corrupt_header, where + "bad dimension");
    }
    const bool sigma_ok = classify(sigma) == WordClass::normal && (sigma & kFractionMask) == 0 && (sigma >> 31) == 0;
    if (!sigma_ok) throw PackError(PackErrc::corrupt_header, where + "sigma is not a positive power of two");
    specs.push_back(LayerSpec{static_cast<LayerKind>(kind), static_cast<int>(inputs), static_cast<int>(outputs),
                              static_cast<int>(kernel), static_cast<Activation>(act)});
    sigmas.push_back(from_word(sigma));
  }

  // Every parameter costs at least two payload bits; refuse shapes the input cannot hold before
  // allocating them.
  double min_payload_bits = 0.0;
  for (const LayerSpec& spec : specs) {
    min_payload_bits += 2.0 * (static_cast<double>(spec.inputs) * spec.outputs * spec.kernel + spec.outputs);
  }
  if (min_payload_bits > 8.0 * static_cast<double>(bytes.size())) {
    throw PackError(PackErrc::truncated, "layer table describes more parameters than the input holds");
  }

  Model model;
  try {
    model = make_zero_model(specs);
  } catch (const std::invalid_argument& e) {
    throw PackError(PackErrc::corrupt_header, e.what());
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) model.layers[i].sigma = sigmas[i];

  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    Layer& layer = model.layers[li];
    for (std::vector<float>* tensor : {&layer.weights, &layer.bias}) {
      const std::uint8_t enc_byte = in.u8();
      if (enc_byte > 2) {
        throw PackError(PackErrc::corrupt_header, "layer " + std::to_string(li) + ": unknown encoding " +
                                                      std::to_string(enc_byte));
      }
      const Encoding encoding = static_cast<Encoding>(enc_byte);
      ExponentCodebook book;
      if (encoding == Encoding::codebook) {
        book.width = in.u8();
        book.min_exp = in.i32();
        if (book.width < 1 || book.width > 8 || book.min_exp < -126 || book.min_exp > 127) {
          throw PackError(PackErrc::corrupt_header, "layer " + std::to_string(li) + ": invalid codebook");
        }
        book.max_exp = book.min_exp + (1 << book.width) - 2;
      }
      const std::vector<std::uint32_t> codes = in.codes(tensor->size(), code_bits(encoding, book));
      for (std::size_t i = 0; i < codes.size(); ++i) {
        std::uint32_t word = 0;
        switch (encoding) {
          case Encoding::full32: word = codes[i]; break;
          case Encoding::sign_exponent9: word = codes[i] << kFractionBits; break;
          case Encoding::codebook:
            try {
              word = book.decode(codes[i]);
            } catch (const std::out_of_range& e) {
              throw PackError(PackErrc::corrupt_payload, "layer " + std::to_string(li) + ": " + e.what());
            }
            break;
        }
        const WordClass cls = classify(word);
        if (cls == WordClass::infinite || cls == WordClass::nan) {
          throw PackError(PackErrc::corrupt_payload, "layer " + std::to_string(li) + ": non-finite parameter");
        }
        (*tensor)[i] = from_word(word);
      }
    }
  }
  if (!in.at_end()) {
    throw PackError(PackErrc::trailing_data, "unexpected bytes after the last tensor at offset " +
                                                 std::to_string(in.position()));
  }
  return model;
}

double compression_ratio(double packed_size, double baseline_size) {
  if (!(baseline_size > 0.0)) throw std::invalid_argument("baseline size must be positive");
  return (packed_size - baseline_size) / baseline_size * 100.0;
}

void write_packed(const std::filesystem::path& path, const Model& model, Encoding encoding) {
  const std::vector<std::uint8_t> bytes = pack(model, encoding);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Model read_packed(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return unpack(bytes);
}

}  // namespace seofp
