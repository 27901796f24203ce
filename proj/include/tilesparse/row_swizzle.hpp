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

#ifndef TILESPARSE_ROW_SWIZZLE_HPP_
#define TILESPARSE_ROW_SWIZZLE_HPP_

#include <cstdint>
#include <vector>

namespace tilesparse {

/// Row processing order. `order[t]` is the source row handled by task slot
/// `t`. Only changes which task computes a row, never the result.
struct RowSwizzle {
  std::vector<std::int32_t> order;

  bool is_permutation() const {
    std::vector<bool> seen(order.size(), false);
    for (auto r : order) {
      if (r < 0 || static_cast<std::size_t>(r) >= order.size() || seen[r]) return false;
      seen[r] = true;
    }
    return true;
  }
};

}  // namespace tilesparse

#endif  // TILESPARSE_ROW_SWIZZLE_HPP_
