// Copyright 2026 The AeroFL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// Symmetric uniform per-tensor quantization of weight deltas.
//
//   levels = 2^(b-1) - 1
//   alpha  = max |x|
//   code   = clip(round(levels * x / alpha), -levels, +levels)
//   x_hat  = code * alpha / levels
//
// b = 32 transmits the raw float values. Rounding is half away from zero.

#ifndef AEROFL_QUANTIZER_HPP_
#define AEROFL_QUANTIZER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aerofl/model.hpp"
#include "aerofl/tensor.hpp"

namespace aerofl {

enum class BitWidth : int { kInt2 = 2, kInt4 = 4, kInt8 = 8, kFp32 = 32 };

inline constexpr std::array<BitWidth, 4> kAllBitWidths = {
    BitWidth::kFp32, BitWidth::kInt8, BitWidth::kInt4, BitWidth::kInt2};

// Throws ConfigError for anything other than 2, 4, 8, 32.
BitWidth parse_bit_width(int bits);
BitWidth parse_bit_width(std::string_view text);  // "4", "INT4", "FP32"

constexpr int bits_of(BitWidth b) noexcept { return static_cast<int>(b); }

// 2^(b-1) - 1; 0 for FP32.
constexpr int quant_levels(BitWidth b) noexcept {
  return b == BitWidth::kFp32 ? 0 : (1 << (bits_of(b) - 1)) - 1;
}

std::string_view bit_width_label(BitWidth b) noexcept;  // "FP32", "INT8", ...

struct QuantizedTensor {
  BitWidth bits = BitWidth::kFp32;
  float scale = 0.0f;            // alpha; unused for FP32
  Shape shape;
  std::vector<std::int8_t> codes;  // b < 32
  std::vector<float> raw;          // b == 32

  std::size_t size() const noexcept { return shape_size(shape); }
  bool operator==(const QuantizedTensor&) const = default;
};

struct QuantizedDelta {
  std::array<QuantizedTensor, kNumParamTensors> tensors;
  int client = 0;
  int round = 0;

  BitWidth bits() const noexcept { return tensors[0].bits; }
  bool operator==(const QuantizedDelta&) const = default;
};

QuantizedTensor quantize(const Tensor& delta, BitWidth bits);
Tensor dequantize(const QuantizedTensor& q);

// ||x - Q_b(x)||^2 accumulated in double.
double distortion(const Tensor& delta, BitWidth bits);

QuantizedDelta quantize_delta(const ModelParams& delta, BitWidth bits,
                              int client, int round);
ModelParams dequantize_delta(const QuantizedDelta& q);

// Sum of distortion() over the eight tensors.
double delta_distortion(const ModelParams& delta, BitWidth bits);

// param_count * b / 8, plus 8 x 4 bytes of scales when requested
// (quantized widths only).
double payload_bytes(std::size_t param_count, BitWidth bits,
                     bool include_scales = false);

// Two-decimal KiB string, e.g. "37.88".
std::string format_kib(double bytes);

// b-bit two's-complement codes, most significant bit first, zero padded to
// a byte boundary. Only INT2/INT4/INT8.
std::vector<std::uint8_t> pack_codes(const QuantizedTensor& q);

// Inverse of pack_codes. Throws std::invalid_argument on a wrong byte
// count, nonzero padding bits, or a code outside +-levels.
QuantizedTensor unpack_codes(std::span<const std::uint8_t> bytes,
                             BitWidth bits, const Shape& shape, float scale);

// Full client upload: header, then per tensor the scale and packed codes
// (or the raw float values for FP32). Little-endian.
std::vector<std::uint8_t> encode_delta(const QuantizedDelta& q);
QuantizedDelta decode_delta(std::span<const std::uint8_t> bytes);

}  // namespace aerofl

#endif  // AEROFL_QUANTIZER_HPP_
