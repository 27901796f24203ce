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

// Small constructors shared by the unit tests.

#ifndef TILESPARSE_TESTS_HELPERS_HPP_
#define TILESPARSE_TESTS_HELPERS_HPP_

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"

namespace helpers {

template <class T = float, class I = std::int32_t>
tilesparse::CsrMatrix<T, I> csr(std::size_t rows, std::size_t cols,
                                std::vector<tilesparse::Offset> offsets, std::vector<I> indices,
                                std::vector<float> values) {
  tilesparse::AlignedVector<T> v;
  for (float f : values) v.push_back(tilesparse::from_float<T>(f));
  return tilesparse::CsrMatrix<T, I>(
      rows, cols, tilesparse::AlignedVector<tilesparse::Offset>(offsets.begin(), offsets.end()),
      tilesparse::AlignedVector<I>(indices.begin(), indices.end()), std::move(v));
}

inline tilesparse::DenseMatrix<float> dense(std::initializer_list<std::initializer_list<float>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  tilesparse::DenseMatrix<float> d(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (float v : row) d(i, j++) = v;
    ++i;
  }
  return d;
}

/// CSR matrix with the given row lengths, columns 0..len-1 in each row
/// spread evenly over `cols`, values drawn from a simple LCG.
inline tilesparse::CsrMatrix<float> with_row_lengths(const std::vector<int>& lengths,
                                                     std::size_t cols, std::uint32_t seed = 1) {
  std::vector<tilesparse::Offset> off{0};
  std::vector<std::int32_t> idx;
  std::vector<float> val;
  std::uint32_t s = seed;
  for (int len : lengths) {
    for (int j = 0; j < len; ++j) {
      idx.push_back(static_cast<std::int32_t>(static_cast<std::size_t>(j) * cols /
                                              static_cast<std::size_t>(len)));
      s = s * 1664525u + 1013904223u;
      val.push_back(static_cast<float>(s >> 8) / static_cast<float>(1u << 24) * 2.0f - 1.0f);
    }
    off.push_back(static_cast<tilesparse::Offset>(idx.size()));
  }
  return csr(lengths.size(), cols, off, idx, val);
}

}  // namespace helpers

#endif  // TILESPARSE_TESTS_HELPERS_HPP_
