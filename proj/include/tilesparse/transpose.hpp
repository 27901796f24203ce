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

#ifndef TILESPARSE_TRANSPOSE_HPP_
#define TILESPARSE_TRANSPOSE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "tilesparse/csr_matrix.hpp"

namespace tilesparse {

/// Cached structure of Aᵀ plus the value gather that produces Aᵀ.values
/// from A.values. Topology rarely changes between calls, so the structure
/// is built once and reused for every value update.
template <class I = std::int32_t>
struct TransposePlan {
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;
  AlignedVector<Offset> t_row_offsets;
  AlignedVector<I> t_col_indices;
  /// transposed.values[t] = source.values[value_perm[t]]
  AlignedVector<Offset> value_perm;

  std::size_t nnz() const noexcept { return value_perm.size(); }
};

template <class T, class I>
TransposePlan<I> transpose_plan(const CsrMatrix<T, I>& m) {
  TransposePlan<I> plan;
  plan.source_rows = m.rows();
  plan.source_cols = m.cols();
  plan.t_row_offsets.assign(m.cols() + 1, 0);
  plan.t_col_indices.resize(m.nnz());
  plan.value_perm.resize(m.nnz());

  const auto idx = m.col_indices();
  for (std::size_t j = 0; j < m.nnz(); ++j) {
    ++plan.t_row_offsets[static_cast<std::size_t>(idx[j]) + 1];
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    plan.t_row_offsets[c + 1] += plan.t_row_offsets[c];
  }

  // Stable counting sort: visiting source rows in order keeps each
  // transposed row's column indices ascending.
  AlignedVector<Offset> cursor(plan.t_row_offsets.begin(), plan.t_row_offsets.end() - 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (Offset j = m.row_begin(r); j < m.row_end(r); ++j) {
      const Offset dst = cursor[static_cast<std::size_t>(idx[j])]++;
      plan.t_col_indices[dst] = static_cast<I>(r);
      plan.value_perm[dst] = j;
    }
  }
  return plan;
}

/// Throws TopologyError when `m` does not have the shape and nnz the plan
/// was built for.
template <class T, class I>
CsrMatrix<T, I> apply_transpose(const TransposePlan<I>& plan, const CsrMatrix<T, I>& m) {
  if (m.rows() != plan.source_rows || m.cols() != plan.source_cols || m.nnz() != plan.nnz()) {
    throw TopologyError("transpose plan built for " + std::to_string(plan.source_rows) + "x" +
                        std::to_string(plan.source_cols) + " with nnz " +
                        std::to_string(plan.nnz()) + ", applied to " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                        " with nnz " + std::to_string(m.nnz()));
  }
  AlignedVector<T> values(plan.nnz());
  const auto src = m.values();
  for (std::size_t t = 0; t < plan.nnz(); ++t) values[t] = src[plan.value_perm[t]];
  return CsrMatrix<T, I>(plan.source_cols, plan.source_rows, plan.t_row_offsets,
                         plan.t_col_indices, std::move(values));
}

template <class T, class I>
CsrMatrix<T, I> transpose(const CsrMatrix<T, I>& m) {
  return apply_transpose(transpose_plan(m), m);
}

}  // namespace tilesparse

#endif  // TILESPARSE_TRANSPOSE_HPP_
