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

#include <algorithm>
#include <cmath>

#include "aerofl/error.hpp"
#include "aerofl/model.hpp"
#include "aerofl/quantizer.hpp"
#include "aerofl/rng.hpp"
#include "doctest.h"

using namespace aerofl;

namespace {

constexpr BitWidth kPacked[] = {BitWidth::kInt2, BitWidth::kInt4, BitWidth::kInt8};

Tensor random_tensor(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Tensor t({n});
  for (auto& v : t.values()) v = static_cast<float>(scale * rng.normal());
  return t;
}

ModelParams random_delta(std::uint64_t seed) {
  auto p = ModelParams::zeros();
  Rng rng(seed);
  for (auto& t : p.tensors)
    for (auto& v : t.values()) v = static_cast<float>(1e-3 * rng.normal());
  return p;
}

}  // namespace

TEST_CASE("ternary grid example") {
  Tensor x({3}, {0.5f, -0.2f, 0.1f});
  auto q = quantize(x, BitWidth::kInt2);
  CHECK(q.scale == 0.5f);
  CHECK(q.codes == std::vector<std::int8_t>{1, 0, 0});
  auto d = dequantize(q);
  CHECK(d.values()[0] == 0.5f);
  CHECK(d.values()[1] == 0.0f);
  CHECK(d.values()[2] == 0.0f);
}

TEST_CASE("ties round away from zero") {
  // 127 * 0.5 / 1 = 63.5 -> 64; mirrored -> -64.
  Tensor x({3}, {1.0f, 0.5f, -0.5f});
  auto q = quantize(x, BitWidth::kInt8);
  CHECK(q.codes == std::vector<std::int8_t>{127, 64, -64});
}

TEST_CASE("FP32 passes through unchanged") {
  auto x = random_tensor(257, 5);
  auto q = quantize(x, BitWidth::kFp32);
  CHECK(q.codes.empty());
  CHECK(dequantize(q) == x);
  CHECK(distortion(x, BitWidth::kFp32) == 0.0);
}

TEST_CASE("all-zero delta") {
  Tensor x({16});
  for (auto b : kPacked) {
    auto q = quantize(x, b);
    CHECK(q.scale == 0.0f);
    CHECK(std::all_of(q.codes.begin(), q.codes.end(), [](auto c) { return c == 0; }));
    CHECK(dequantize(q) == x);
  }
}

TEST_CASE("quantizer properties") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto x = random_tensor(1 + seed * 37, seed, std::pow(10.0, -static_cast<double>(seed % 5)));
    float amax = 0.0f;
    for (float v : x.values()) amax = std::max(amax, std::abs(v));

    for (auto b : kPacked) {
      CAPTURE(seed);
      CAPTURE(bits_of(b));
      const int L = quant_levels(b);
      auto q = quantize(x, b);

      // Scale is max|x| exactly and the extreme element hits the top level.
      CHECK(q.scale == amax);
      CHECK(std::all_of(q.codes.begin(), q.codes.end(),
                        [L](int c) { return c >= -L && c <= L; }));
      auto d = dequantize(q);
      const auto top = std::max_element(x.values().begin(), x.values().end(),
                                        [](float a, float c) { return std::abs(a) < std::abs(c); });
      const auto pos = static_cast<std::size_t>(top - x.values().begin());
      CHECK(std::abs(q.codes[pos]) == L);
      CHECK(std::abs(d.values()[pos]) == amax);

      // Half-step error bound.
      const double bound = static_cast<double>(q.scale) / (2.0 * L);
      double worst = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(static_cast<double>(x[i]) - d[i]));
      CHECK(worst <= bound * (1.0 + 1e-6));

      // Idempotence.
      auto q2 = quantize(d, b);
      CHECK(q2.codes == q.codes);
      CHECK(q2.scale == q.scale);
      CHECK(distortion(d, b) < 1e-12 * static_cast<double>(amax) * amax * x.size());

      // Symmetry.
      Tensor neg = x;
      for (auto& v : neg.values()) v = -v;
      auto qn = quantize(neg, b);
      CHECK(qn.scale == q.scale);
      for (std::size_t i = 0; i < q.codes.size(); ++i) CHECK(qn.codes[i] == -q.codes[i]);

      // Packing round trip.
      auto bytes = pack_codes(q);
      CHECK(bytes.size() == (x.size() * bits_of(b) + 7) / 8);
      CHECK(unpack_codes(bytes, b, q.shape, q.scale) == q);
    }
  }
}

TEST_CASE("INT2 codes are ternary") {
  auto q = quantize(random_tensor(1000, 9), BitWidth::kInt2);
  for (auto c : q.codes) CHECK((c == -1 || c == 0 || c == 1));
}

TEST_CASE("error bound on a uniform ramp") {
  Tensor x({256});
  for (std::size_t i = 0; i < 256; ++i)
    x[i] = static_cast<float>(-1.0 + 2.0 * static_cast<double>(i) / 255.0);
  auto d = dequantize(quantize(x, BitWidth::kInt8));
  double worst = 0.0;
  for (std::size_t i = 0; i < 256; ++i)
    worst = std::max(worst, std::abs(static_cast<double>(x[i]) - d[i]));
  CHECK(worst <= 1.0 / (2.0 * 127.0) + 1e-7);
}

TEST_CASE("distortion shrinks as bits grow") {
  auto x = random_tensor(10000, 2024);
  const double d2 = distortion(x, BitWidth::kInt2);
  const double d4 = distortion(x, BitWidth::kInt4);
  const double d8 = distortion(x, BitWidth::kInt8);
  CHECK(d2 > d4);
  CHECK(d4 > d8);
  CHECK(d8 > 0.0);
}

TEST_CASE("payload sizes") {
  CHECK(payload_bytes(9697, BitWidth::kFp32) == 38788.0);
  CHECK(payload_bytes(9697, BitWidth::kInt4) == 4848.5);
  CHECK(payload_bytes(9697, BitWidth::kInt2) == 2424.25);
  CHECK(payload_bytes(9697, BitWidth::kInt4, true) == 4848.5 + 32.0);
  CHECK(payload_bytes(9697, BitWidth::kFp32, true) == 9697 * 4.0);
  CHECK(format_kib(payload_bytes(9697, BitWidth::kFp32)) == "37.88");
  CHECK(format_kib(payload_bytes(9697, BitWidth::kInt8)) == "9.47");
  CHECK(format_kib(payload_bytes(9697, BitWidth::kInt4)) == "4.73");
  CHECK(format_kib(payload_bytes(9697, BitWidth::kInt2)) == "2.37");
}

TEST_CASE("packed layout") {
  SUBCASE("most significant first, two's complement") {
    QuantizedTensor q;
    q.bits = BitWidth::kInt4;
    q.shape = {3};
    q.codes = {1, -1, 7};
    // 0001 1111 | 0111 0000
    CHECK(pack_codes(q) == std::vector<std::uint8_t>{0x1F, 0x70});
    q.bits = BitWidth::kInt2;
    q.codes = {1, -1, 0};
    // 01 11 00 00
    CHECK(pack_codes(q) == std::vector<std::uint8_t>{0x70});
  }
  SUBCASE("model-sized tensor at INT4") {
    auto q = quantize(random_tensor(9697, 3), BitWidth::kInt4);
    CHECK(pack_codes(q).size() == 4849);
  }
  SUBCASE("empty tensor") {
    auto q = quantize(Tensor({0}), BitWidth::kInt4);
    CHECK(pack_codes(q).empty());
    CHECK(unpack_codes({}, BitWidth::kInt4, {0}, 0.0f).codes.empty());
  }
}

TEST_CASE("corrupted packed data is rejected") {
  QuantizedTensor q;
  q.bits = BitWidth::kInt4;
  q.shape = {3};
  q.codes = {1, -1, 7};
  auto bytes = pack_codes(q);
  auto bad = bytes;
  bad[1] |= 0x01;  // padding bit
  CHECK_THROWS_AS(unpack_codes(bad, BitWidth::kInt4, q.shape, 1.0f), std::invalid_argument);
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(unpack_codes(bad, BitWidth::kInt4, q.shape, 1.0f), std::invalid_argument);
  bad = bytes;
  bad[0] = 0x8F;  // -8 is outside the symmetric range
  CHECK_THROWS_AS(unpack_codes(bad, BitWidth::kInt4, q.shape, 1.0f), std::invalid_argument);
}

TEST_CASE("delta wire message") {
  auto delta = random_delta(77);
  for (auto b : kAllBitWidths) {
    auto q = quantize_delta(delta, b, 3, 11);
    auto msg = encode_delta(q);
    auto back = decode_delta(msg);
    CHECK(back == q);
    CHECK(back.client == 3);
    CHECK(back.round == 11);
    // Header, then per tensor a count, a scale (quantized only) and the body.
    std::size_t body = 0;
    for (const auto& t : q.tensors) {
      body += b == BitWidth::kFp32 ? 4 + 4 * t.size()
                                   : 8 + (t.size() * bits_of(b) + 7) / 8;
    }
    CHECK(msg.size() == 4 + 1 + 2 + 2 + body);

    auto truncated = msg;
    truncated.pop_back();
    CHECK_THROWS_AS(decode_delta(truncated), std::invalid_argument);
    auto magic = msg;
    magic[0] = 'X';
    CHECK_THROWS_AS(decode_delta(magic), std::invalid_argument);
  }
  CHECK(delta_distortion(delta, BitWidth::kFp32) == 0.0);
  CHECK(delta_distortion(delta, BitWidth::kInt2) > delta_distortion(delta, BitWidth::kInt8));
}

TEST_CASE("bit width parsing") {
  CHECK(parse_bit_width(4) == BitWidth::kInt4);
  CHECK(parse_bit_width("INT8") == BitWidth::kInt8);
  CHECK(parse_bit_width("fp32") == BitWidth::kFp32);
  CHECK(parse_bit_width("2") == BitWidth::kInt2);
  CHECK_THROWS_AS(parse_bit_width(16), ConfigError);
  CHECK_THROWS_AS(parse_bit_width("INT3"), ConfigError);
}
