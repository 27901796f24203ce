// Copyright 2026 The tilesparse Authors.
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

#ifndef TILESPARSE_HALF_HPP_
#define TILESPARSE_HALF_HPP_

#include <bit>
#include <cstdint>
#include <limits>

namespace tilesparse {

/// IEEE 754 binary16 storage type. Arithmetic is done by converting to
/// float; conversions from float round to nearest, ties to even.
class half {
 public:
  constexpr half() noexcept = default;
  constexpr half(float f) noexcept : bits_(from_float(f)) {}  // NOLINT

  static constexpr half from_bits(std::uint16_t bits) noexcept {
    half h;
    h.bits_ = bits;
    return h;
  }

  constexpr std::uint16_t bits() const noexcept { return bits_; }
  constexpr operator float() const noexcept { return to_float(bits_); }  // NOLINT

  constexpr bool is_nan() const noexcept {
    return (bits_ & 0x7c00u) == 0x7c00u && (bits_ & 0x03ffu) != 0;
  }

  friend constexpr bool operator==(half a, half b) noexcept {
    return static_cast<float>(a) == static_cast<float>(b);
  }

  static constexpr std::uint16_t from_float(float f) noexcept {
    const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
    const std::uint32_t sign = (x >> 16) & 0x8000u;
    const std::uint32_t abs = x & 0x7fffffffu;

    if (abs > 0x7f800000u) {
      // NaN: keep the payload's top bits and force a quiet NaN.
      return static_cast<std::uint16_t>(sign | 0x7e00u | ((abs >> 13) & 0x3ffu));
    }
    // 65520 is the midpoint between 65504 and 2^16; ties go to the even
    // neighbour, which is infinity.
    if (abs >= 0x477ff000u) return static_cast<std::uint16_t>(sign | 0x7c00u);

    if (abs < 0x38800000u) {
      // Result is subnormal (or zero). 2^-25 itself ties to zero.
      if (abs <= 0x33000000u) return static_cast<std::uint16_t>(sign);
      const std::uint32_t exp = abs >> 23;
      const std::uint32_t mant = (abs & 0x7fffffu) | 0x800000u;
      const std::uint32_t shift = 126u - exp;
      std::uint32_t q = mant >> shift;
      const std::uint32_t rem = mant & ((1u << shift) - 1u);
      const std::uint32_t halfway = 1u << (shift - 1u);
      if (rem > halfway || (rem == halfway && (q & 1u))) ++q;
      return static_cast<std::uint16_t>(sign | q);
    }

    std::uint32_t q = (abs - 0x38000000u) >> 13;
    const std::uint32_t rem = abs & 0x1fffu;
    if (rem > 0x1000u || (rem == 0x1000u && (q & 1u))) ++q;
    return static_cast<std::uint16_t>(sign | q);
  }

  static constexpr float to_float(std::uint16_t h) noexcept {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1fu;
    const std::uint32_t mant = h & 0x3ffu;
    if (exp == 0) {
      // Subnormal values are mant * 2^-24, exact in float.
      const float magnitude = static_cast<float>(mant) * 5.9604644775390625e-8f;
      return sign ? -magnitude : magnitude;
    }
    if (exp == 31) {
      return std::bit_cast<float>(sign | 0x7f800000u | (mant << 13));
    }
    return std::bit_cast<float>(sign | ((exp + 112u) << 23) | (mant << 13));
  }

 private:
  std::uint16_t bits_ = 0;
};

static_assert(sizeof(half) == 2);

inline constexpr float to_float(float v) noexcept { return v; }
inline constexpr float to_float(half v) noexcept { return static_cast<float>(v); }

template <class T>
constexpr T from_float(float v) noexcept {
  return static_cast<T>(v);
}

enum class Precision { kF32, kF16 };

template <class T>
inline constexpr Precision precision_of = Precision::kF32;
template <>
inline constexpr Precision precision_of<half> = Precision::kF16;

inline const char* to_string(Precision p) noexcept {
  return p == Precision::kF16 ? "f16" : "f32";
}

}  // namespace tilesparse

template <>
class std::numeric_limits<tilesparse::half> {
 public:
  static constexpr bool is_specialized = true;
  static constexpr bool has_infinity = true;
  static constexpr bool has_quiet_NaN = true;
  static constexpr int digits = 11;
  static constexpr tilesparse::half max() noexcept {
    return tilesparse::half::from_bits(0x7bff);
  }
  static constexpr tilesparse::half lowest() noexcept {
    return tilesparse::half::from_bits(0xfbff);
  }
  static constexpr tilesparse::half min() noexcept {
    return tilesparse::half::from_bits(0x0400);
  }
  static constexpr tilesparse::half denorm_min() noexcept {
    return tilesparse::half::from_bits(0x0001);
  }
  static constexpr tilesparse::half epsilon() noexcept {
    return tilesparse::half::from_bits(0x1400);
  }
  static constexpr tilesparse::half infinity() noexcept {
    return tilesparse::half::from_bits(0x7c00);
  }
  static constexpr tilesparse::half quiet_NaN() noexcept {
    return tilesparse::half::from_bits(0x7e00);
  }
};

#endif  // TILESPARSE_HALF_HPP_
