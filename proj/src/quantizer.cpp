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

#include "aerofl/quantizer.hpp"

#include <boost/algorithm/string/predicate.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "aerofl/error.hpp"

namespace aerofl {

BitWidth parse_bit_width(int bits) {
  switch (bits) {
    case 2:
      return BitWidth::kInt2;
    case 4:
      return BitWidth::kInt4;
    case 8:
      return BitWidth::kInt8;
    case 32:
      return BitWidth::kFp32;
    default:
      throw ConfigError("unsupported bit width " + std::to_string(bits) +
                        " (expected 2, 4, 8 or 32)");
  }
}

BitWidth parse_bit_width(std::string_view text) {
  for (auto b : kAllBitWidths) {
    if (boost::iequals(text, bit_width_label(b)) ||
        text == std::to_string(bits_of(b))) {
      return b;
    }
  }
  throw ConfigError("unsupported bit width '" + std::string(text) + "'");
}

std::string_view bit_width_label(BitWidth b) noexcept {
  switch (b) {
    case BitWidth::kFp32:
      return "FP32";
    case BitWidth::kInt8:
      return "INT8";
    case BitWidth::kInt4:
      return "INT4";
    case BitWidth::kInt2:
      return "INT2";
  }
  return "?";
}

QuantizedTensor quantize(const Tensor& delta, BitWidth bits) {
  QuantizedTensor q;
  q.bits = bits;
  q.shape = delta.shape();
  if (bits == BitWidth::kFp32) {
    q.raw.assign(delta.values().begin(), delta.values().end());
    return q;
  }
  float alpha = 0.0f;
  for (float v : delta.values()) alpha = std::max(alpha, std::abs(v));
  q.scale = alpha;
  q.codes.assign(delta.size(), 0);
  if (alpha == 0.0f) return q;

  const double levels = quant_levels(bits);
  const double a = alpha;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    // std::round rounds halfway cases away from zero.
    double r = std::round(levels * static_cast<double>(delta[i]) / a);
    r = std::clamp(r, -levels, levels);
    q.codes[i] = static_cast<std::int8_t>(r);
  }
  return q;
}

Tensor dequantize(const QuantizedTensor& q) {
  if (q.bits == BitWidth::kFp32) return Tensor(q.shape, q.raw);
  if (q.codes.size() != q.size()) {
    throw std::invalid_argument("dequantize: code count does not match shape");
  }
  const double levels = quant_levels(q.bits);
  const double a = q.scale;
  std::vector<float> values(q.codes.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(static_cast<double>(q.codes[i]) * a / levels);
  }
  return Tensor(q.shape, std::move(values));
}

double distortion(const Tensor& delta, BitWidth bits) {
  if (bits == BitWidth::kFp32) return 0.0;
  auto rec = dequantize(quantize(delta, bits));
  double sum = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double d = static_cast<double>(delta[i]) - static_cast<double>(rec[i]);
    sum += d * d;
  }
  return sum;
}

QuantizedDelta quantize_delta(const ModelParams& delta, BitWidth bits,
                              int client, int round) {
  QuantizedDelta q;
  q.client = client;
  q.round = round;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    q.tensors[i] = quantize(delta[i], bits);
  }
  return q;
}

ModelParams dequantize_delta(const QuantizedDelta& q) {
  ModelParams out;
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    if (q.tensors[i].shape != param_shapes()[i]) {
      throw std::invalid_argument("dequantize_delta: tensor " +
                                  std::string(kParamNames[i]) + " has shape " +
                                  shape_string(q.tensors[i].shape));
    }
    if (q.tensors[i].bits != q.bits()) {
      throw std::invalid_argument("dequantize_delta: mixed bit widths");
    }
    out[i] = dequantize(q.tensors[i]);
  }
  return out;
}

double delta_distortion(const ModelParams& delta, BitWidth bits) {
  double sum = 0.0;
  for (const auto& t : delta.tensors) sum += distortion(t, bits);
  return sum;
}

double payload_bytes(std::size_t param_count, BitWidth bits,
                     bool include_scales) {
  double bytes = static_cast<double>(param_count) * bits_of(bits) / 8.0;
  if (include_scales && bits != BitWidth::kFp32) bytes += static_cast<double>(kNumParamTensors) * 4.0;
  return bytes;
}

std::string format_kib(double bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", bytes / 1024.0);
  return buf;
}

namespace {

void require_packable(BitWidth bits) {
  if (bits == BitWidth::kFp32) {
    throw std::invalid_argument("bit packing applies to INT2/INT4/INT8 only");
  }
}

std::size_t packed_size(std::size_t n, BitWidth bits) {
  return (n * static_cast<std::size_t>(bits_of(bits)) + 7) / 8;
}

}  // namespace

std::vector<std::uint8_t> pack_codes(const QuantizedTensor& q) {
  require_packable(q.bits);
  const unsigned b = static_cast<unsigned>(bits_of(q.bits));
  const int levels = quant_levels(q.bits);
  const unsigned mask = (1u << b) - 1u;
  std::vector<std::uint8_t> out(packed_size(q.codes.size(), q.bits), 0);
  std::size_t bit_pos = 0;
  for (std::int8_t code : q.codes) {
    if (code < -levels || code > levels) {
      throw std::invalid_argument("pack_codes: code " + std::to_string(code) +
                                  " outside +-" + std::to_string(levels));
    }
    const unsigned field = static_cast<unsigned>(code) & mask;
    // b divides 8, so a field never straddles a byte.
    const std::size_t byte = bit_pos / 8;
    const unsigned shift = 8u - b - static_cast<unsigned>(bit_pos % 8);
    out[byte] = static_cast<std::uint8_t>(out[byte] | (field << shift));
    bit_pos += b;
  }
  return out;
}

QuantizedTensor unpack_codes(std::span<const std::uint8_t> bytes,
                             BitWidth bits, const Shape& shape, float scale) {
  require_packable(bits);
  const std::size_t n = shape_size(shape);
  if (bytes.size() != packed_size(n, bits)) {
    throw std::invalid_argument("unpack_codes: expected " +
                                std::to_string(packed_size(n, bits)) +
                                " bytes, got " + std::to_string(bytes.size()));
  }
  const unsigned b = static_cast<unsigned>(bits_of(bits));
  const int levels = quant_levels(bits);
  const unsigned mask = (1u << b) - 1u;
  QuantizedTensor q;
  q.bits = bits;
  q.scale = scale;
  q.shape = shape;
  q.codes.resize(n);
  std::size_t bit_pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned shift = 8u - b - static_cast<unsigned>(bit_pos % 8);
    unsigned field = (bytes[bit_pos / 8] >> shift) & mask;
    int code = static_cast<int>(field);
    if (field & (1u << (b - 1))) code -= static_cast<int>(1u << b);
    if (code < -levels) {
      throw std::invalid_argument("unpack_codes: reserved code at element " +
                                  std::to_string(i));
    }
    q.codes[i] = static_cast<std::int8_t>(code);
    bit_pos += b;
  }
  if (bit_pos % 8 != 0) {
    const unsigned pad = 8u - static_cast<unsigned>(bit_pos % 8);
    if ((bytes.back() & ((1u << pad) - 1u)) != 0) {
      throw std::invalid_argument("unpack_codes: nonzero padding bits");
    }
  }
  return q;
}

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'Q', 'D', '1'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v & 0xff));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) {
    out_.insert(out_.end(), b.begin(), b.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint16_t u16() {
    std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (u8() << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      throw std::invalid_argument("decode_delta: truncated message");
    }
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_delta(const QuantizedDelta& q) {
  Writer w;
  w.bytes(kMagic);
  w.u8(static_cast<std::uint8_t>(bits_of(q.bits())));
  w.u16(static_cast<std::uint16_t>(q.client));
  w.u16(static_cast<std::uint16_t>(q.round));
  for (const auto& t : q.tensors) {
    if (t.bits != q.bits()) {
      throw std::invalid_argument("encode_delta: mixed bit widths");
    }
    w.u32(static_cast<std::uint32_t>(t.size()));
    if (t.bits == BitWidth::kFp32) {
      for (float v : t.raw) w.f32(v);
    } else {
      w.f32(t.scale);
      w.bytes(pack_codes(t));
    }
  }
  return w.take();
}

QuantizedDelta decode_delta(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
    throw std::invalid_argument("decode_delta: bad magic");
  }
  QuantizedDelta q;
  BitWidth bits;
  try {
    bits = parse_bit_width(static_cast<int>(r.u8()));
  } catch (const ConfigError& e) {
    throw std::invalid_argument(std::string("decode_delta: ") + e.what());
  }
  q.client = r.u16();
  q.round = r.u16();
  for (std::size_t i = 0; i < kNumParamTensors; ++i) {
    const auto& shape = param_shapes()[i];
    if (r.u32() != shape_size(shape)) {
      throw std::invalid_argument("decode_delta: wrong element count for " +
                                  std::string(kParamNames[i]));
    }
    if (bits == BitWidth::kFp32) {
      QuantizedTensor t;
      t.bits = bits;
      t.shape = shape;
      t.raw.resize(shape_size(shape));
      for (auto& v : t.raw) v = r.f32();
      q.tensors[i] = std::move(t);
    } else {
      float scale = r.f32();
      auto packed = r.bytes(packed_size(shape_size(shape), bits));
      q.tensors[i] = unpack_codes(packed, bits, shape, scale);
    }
  }
  if (!r.done()) throw std::invalid_argument("decode_delta: trailing bytes");
  return q;
}

}  // namespace aerofl
