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

#ifndef TILESPARSE_SIMD_HPP_
#define TILESPARSE_SIMD_HPP_

#include <cstring>
#include <type_traits>

#include "tilesparse/half.hpp"

namespace tilesparse::simd {

// Fixed-width float vectors. Width 4 is a 128-bit register, the CPU
// counterpart of a float4 load; width 1 is a plain scalar.
template <int W>
struct VecType;
template <>
struct VecType<1> {
  using type = float;
};
template <>
struct VecType<2> {
  typedef float type __attribute__((vector_size(8)));
};
template <>
struct VecType<4> {
  typedef float type __attribute__((vector_size(16)));
};

template <int W>
using Vec = typename VecType<W>::type;

template <int W>
inline Vec<W> zero() noexcept {
  if constexpr (W == 1) {
    return 0.0f;
  } else {
    return Vec<W>{};
  }
}

/// Loads W consecutive elements, widening half to float.
template <int W, class T>
inline Vec<W> load(const T* p) noexcept {
  if constexpr (W == 1) {
    return to_float(*p);
  } else if constexpr (std::is_same_v<T, float>) {
    Vec<W> v;
    std::memcpy(&v, p, sizeof(v));
    return v;
  } else {
    Vec<W> v;
    for (int i = 0; i < W; ++i) v[i] = to_float(p[i]);
    return v;
  }
}

template <int W>
inline void store(float* p, Vec<W> v) noexcept {
  if constexpr (W == 1) {
    *p = v;
  } else {
    std::memcpy(p, &v, sizeof(v));
  }
}

/// Fixed pairwise tree: ((l0 + l1) + (l2 + l3)).
template <int W>
inline float reduce(Vec<W> v) noexcept {
  if constexpr (W == 1) {
    return v;
  } else if constexpr (W == 2) {
    return v[0] + v[1];
  } else {
    return (v[0] + v[1]) + (v[2] + v[3]);
  }
}

}  // namespace tilesparse::simd

#endif  // TILESPARSE_SIMD_HPP_
