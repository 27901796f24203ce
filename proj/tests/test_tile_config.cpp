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

#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <vector>

#include "tilesparse/tile_config.hpp"

namespace {

using namespace tilesparse;

TEST(TileConfig, ValidityRules) {
  EXPECT_TRUE(is_valid({32, 64, 1, 4}));
  EXPECT_TRUE(is_valid({8, 3, 8, 1}));
  EXPECT_FALSE(is_valid({24, 64, 1, 4}));  // k not a multiple of 16
  EXPECT_FALSE(is_valid({0, 64, 1, 4}));
  EXPECT_FALSE(is_valid({32, 66, 1, 4}));  // x not a multiple of 4
  EXPECT_FALSE(is_valid({32, 64, 3, 4}));
  EXPECT_FALSE(is_valid({32, 64, 1, 3}));
  EXPECT_FALSE(is_valid({32, 0, 1, 1}));
  EXPECT_THROW(check_tile_config({32, 64, 16, 4}), ConfigError);
}

TEST(DefaultTileConfig, WideOutput) {
  const auto c = default_tile_config(128);
  EXPECT_EQ(c.block_items_x, 64);
  EXPECT_EQ(c.vector_width, 4);
  EXPECT_EQ(c.block_items_k, 32);
  EXPECT_EQ(c.block_items_y, 1);
}

TEST(DefaultTileConfig, TwentyColumns) {
  // 20 rounds up to 32 and is divisible by 4, so the widest vector applies.
  const auto c = default_tile_config(20);
  EXPECT_EQ(c.block_items_x, 32);
  EXPECT_EQ(c.vector_width, 4);
  EXPECT_EQ(c.block_items_y, 1);
}

TEST(DefaultTileConfig, NarrowOutputStacksRows) {
  const auto c = default_tile_config(8);
  EXPECT_EQ(c.block_items_x, 8);
  EXPECT_EQ(c.vector_width, 4);
  EXPECT_EQ(c.block_items_y, 4);
  EXPECT_EQ(default_tile_config(1).block_items_y, 8);
  EXPECT_EQ(default_tile_config(1).vector_width, 1);
  EXPECT_EQ(default_tile_config(1).block_items_k, 8);
}

TEST(DefaultTileConfig, OddAndEvenWidths) {
  EXPECT_EQ(default_tile_config(33).vector_width, 1);
  EXPECT_EQ(default_tile_config(34).vector_width, 2);
  EXPECT_EQ(default_tile_config(34).block_items_k, 16);
  EXPECT_EQ(default_tile_config(6).block_items_x, 8);
  EXPECT_EQ(default_tile_config(6).vector_width, 2);
}

TEST(DefaultTileConfig, Sddmm) {
  const auto c = default_tile_config(64, KernelKind::kSddmm);
  EXPECT_EQ(c.block_items_x, 32);
  EXPECT_EQ(c.vector_width, 4);
  EXPECT_EQ(default_tile_config(33, KernelKind::kSddmm).vector_width, 1);
}

TEST(DefaultTileConfig, AlwaysValid) {
  for (std::size_t n = 1; n <= 300; ++n) {
    EXPECT_TRUE(is_valid(default_tile_config(n))) << n;
    EXPECT_TRUE(is_valid(default_tile_config(n, KernelKind::kSddmm))) << n;
  }
  EXPECT_THROW(default_tile_config(0), ConfigError);
}

TEST(Roma, Examples) {
  EXPECT_EQ(roma_align(6, 10, 4), (RomaAdjustment{4, 12, 2}));
  EXPECT_EQ(roma_align(8, 5, 4), (RomaAdjustment{8, 5, 0}));
  for (std::int64_t off = 0; off < 20; ++off) {
    EXPECT_EQ(roma_align(off, 3, 1), (RomaAdjustment{off, 3, 0}));
  }
}

TEST(Roma, Invariants) {
  for (int vw : {1, 2, 4}) {
    for (std::int64_t off = 0; off < 64; ++off) {
      const auto a = roma_align(off, 7, vw);
      EXPECT_EQ(a.aligned_offset % vw, 0);
      EXPECT_EQ(a.aligned_offset + a.mask_prefix_len, off);
      EXPECT_EQ(a.adjusted_nnz, 7 + a.mask_prefix_len);
      EXPECT_GE(a.mask_prefix_len, 0);
      EXPECT_LT(a.mask_prefix_len, vw);
    }
  }
}

TEST(Prescale, Examples) {
  const std::vector<std::int32_t> idx{0, 2, 5};
  EXPECT_EQ(prescale_indices(idx, 4), (std::vector<std::int32_t>{0, 8, 20}));
  EXPECT_TRUE(prescale_indices({}, 4).empty());
  const std::vector<std::int32_t> big{70000};
  EXPECT_THROW(prescale_indices(big, 70000), IndexOverflowError);
}

}  // namespace
