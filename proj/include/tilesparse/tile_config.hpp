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

#ifndef TILESPARSE_TILE_CONFIG_HPP_
#define TILESPARSE_TILE_CONFIG_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tilesparse/error.hpp"

namespace tilesparse {

/// Kernel decomposition parameters.
///
/// One task computes a `block_items_x`-wide strip of output columns for
/// `block_items_y` rows, stepping through each row's nonzeros
/// `block_items_k` at a time. `vector_width` is the element count of every
/// wide load/store.
struct TileConfig {
  int block_items_k = 32;
  int block_items_x = 64;
  int block_items_y = 1;
  int vector_width = 4;

  friend bool operator==(const TileConfig&, const TileConfig&) = default;

  std::string to_string() const {
    return "k" + std::to_string(block_items_k) + "_x" + std::to_string(block_items_x) + "_y" +
           std::to_string(block_items_y) + "_v" + std::to_string(vector_width);
  }
};

enum class KernelKind { kSpmm, kSddmm };

/// Throws ConfigError describing the first broken invariant.
inline void check_tile_config(const TileConfig& c) {
  const int vw = c.vector_width;
  if (vw != 1 && vw != 2 && vw != 4) {
    throw ConfigError("vector_width must be 1, 2 or 4, got " + std::to_string(vw));
  }
  if (c.block_items_k <= 0 || c.block_items_k % (4 * vw) != 0) {
    throw ConfigError("block_items_k must be a positive multiple of 4*vector_width (" +
                      std::to_string(4 * vw) + "), got " + std::to_string(c.block_items_k));
  }
  if (c.block_items_x <= 0 || c.block_items_x % vw != 0) {
    throw ConfigError("block_items_x must be a positive multiple of vector_width, got " +
                      std::to_string(c.block_items_x));
  }
  const int y = c.block_items_y;
  if (y != 1 && y != 2 && y != 4 && y != 8) {
    throw ConfigError("block_items_y must be 1, 2, 4 or 8, got " + std::to_string(y));
  }
}

inline bool is_valid(const TileConfig& c) {
  try {
    check_tile_config(c);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Kernel selection heuristic.
///
/// For SpMM `n` is the number of output columns and the tile width is `n`
/// rounded up to a power of two, capped at 64. For SDDMM the tile covers
/// 32 nonzeros and `n` is the inner (dot product) dimension. In both cases
/// the widest vector dividing both the tile width and `n` is used, and
/// narrow tiles are stacked over several rows so a task still covers 32
/// outputs.
inline TileConfig default_tile_config(std::size_t n, KernelKind kernel = KernelKind::kSpmm) {
  if (n == 0) throw ConfigError("default_tile_config: n must be >= 1");
  TileConfig c;
  c.block_items_x = kernel == KernelKind::kSpmm
                        ? static_cast<int>(std::min<std::size_t>(64, next_pow2(n)))
                        : 32;
  c.vector_width = 1;
  for (int vw : {4, 2}) {
    if (c.block_items_x % vw == 0 && n % static_cast<std::size_t>(vw) == 0) {
      c.vector_width = vw;
      break;
    }
  }
  c.block_items_k = 8 * c.vector_width;
  c.block_items_y = c.block_items_x >= 32 ? 1 : std::min(8, 32 / c.block_items_x);
  return c;
}

/// Row start moved back to a vector-aligned position.
struct RomaAdjustment {
  std::int64_t aligned_offset = 0;
  std::int64_t adjusted_nnz = 0;
  int mask_prefix_len = 0;

  friend bool operator==(const RomaAdjustment&, const RomaAdjustment&) = default;
};

/// Reverse-offset memory alignment: the row start is decremented to the
/// nearest multiple of `vector_width` and the row grows by the same amount.
/// The borrowed prefix belongs to the previous row and must be masked to
/// zero before it is accumulated.
inline constexpr RomaAdjustment roma_align(std::int64_t row_offset, std::int64_t row_nnz,
                                           int vector_width) noexcept {
  const int prefix = static_cast<int>(row_offset & (vector_width - 1));
  return {row_offset - prefix, row_nnz + prefix, prefix};
}

/// Multiplies every column index by the dense row stride so the inner loop
/// can address B directly. Throws IndexOverflowError when a scaled index
/// does not fit in 32 bits.
inline std::vector<std::int32_t> prescale_indices(std::span<const std::int32_t> indices,
                                                  std::int64_t row_stride_elements) {
  std::vector<std::int32_t> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::int64_t v = static_cast<std::int64_t>(indices[i]) * row_stride_elements;
    if (v > std::numeric_limits<std::int32_t>::max() ||
        v < std::numeric_limits<std::int32_t>::min()) {
      throw IndexOverflowError("pre-scaled index " + std::to_string(v) +
                               " does not fit in 32 bits");
    }
    out[i] = static_cast<std::int32_t>(v);
  }
  return out;
}

}  // namespace tilesparse

#endif  // TILESPARSE_TILE_CONFIG_HPP_
