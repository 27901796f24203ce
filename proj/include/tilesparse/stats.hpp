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

#ifndef TILESPARSE_STATS_HPP_
#define TILESPARSE_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "tilesparse/csr_matrix.hpp"

namespace tilesparse {

struct MatrixStats {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t nnz = 0;
  double sparsity = 0.0;  // 1 - nnz / (rows * cols)
  double avg_row_length = 0.0;
  /// Population standard deviation of row lengths divided by their mean.
  /// Empty when the matrix has no nonzeros.
  std::optional<double> row_cov;
  std::size_t min_row_length = 0;
  std::size_t max_row_length = 0;
};

/// Coefficient of variation of a sequence of lengths; empty when the mean
/// is zero.
template <class Range>
std::optional<double> coefficient_of_variation(const Range& lengths) {
  double n = 0.0, sum = 0.0;
  for (auto v : lengths) {
    sum += static_cast<double>(v);
    n += 1.0;
  }
  if (n == 0.0 || sum == 0.0) return std::nullopt;
  const double mean = sum / n;
  double sq = 0.0;
  for (auto v : lengths) {
    const double d = static_cast<double>(v) - mean;
    sq += d * d;
  }
  return std::sqrt(sq / n) / mean;
}

template <class T, class I>
MatrixStats compute_stats(const CsrMatrix<T, I>& m) {
  MatrixStats s;
  s.rows = m.rows();
  s.cols = m.cols();
  s.nnz = m.nnz();
  const double cells = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
  s.sparsity = cells > 0.0 ? 1.0 - static_cast<double>(m.nnz()) / cells : 1.0;
  if (m.rows() == 0) return s;

  std::vector<std::size_t> lengths(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) lengths[r] = m.row_length(r);
  s.avg_row_length = static_cast<double>(m.nnz()) / static_cast<double>(m.rows());
  s.min_row_length = *std::min_element(lengths.begin(), lengths.end());
  s.max_row_length = *std::max_element(lengths.begin(), lengths.end());
  if (s.min_row_length == s.max_row_length && m.nnz() > 0) {
    s.row_cov = 0.0;  // exact, no rounding noise
  } else {
    s.row_cov = coefficient_of_variation(lengths);
  }
  return s;
}

}  // namespace tilesparse

#endif  // TILESPARSE_STATS_HPP_
