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

#ifndef TILESPARSE_SDDMM_HPP_
#define TILESPARSE_SDDMM_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/row_swizzle.hpp"
#include "tilesparse/simd.hpp"
#include "tilesparse/thread_pool.hpp"
#include "tilesparse/tile_config.hpp"

namespace tilesparse {

/// D = (A * Bᵀ) ⊙ 𝕀[pattern]. `b` is stored N x K and used transposed.
template <class T = float, class I = std::int32_t>
struct SddmmProblem {
  const DenseMatrix<T>& a;        // M x K
  const DenseMatrix<T>& b;        // N x K
  const CsrMatrix<T, I>& pattern;  // M x N, values ignored unless scaling
};

struct SddmmOptions {
  /// Multiply each output by the pattern's stored value (A Bᵀ ⊙ C).
  bool scale_values = false;
  /// Order in which row groups are visited.
  const RowSwizzle* swizzle = nullptr;
  ThreadPool* pool = nullptr;
};

namespace detail {

template <class T, class I>
void check_sddmm(const SddmmProblem<T, I>& p) {
  if (p.a.cols() != p.b.cols()) {
    throw ShapeError("sddmm: A has inner dimension " + std::to_string(p.a.cols()) +
                     ", B has " + std::to_string(p.b.cols()));
  }
  if (p.pattern.rows() != p.a.rows() || p.pattern.cols() != p.b.rows()) {
    throw ShapeError("sddmm: pattern is " + std::to_string(p.pattern.rows()) + "x" +
                     std::to_string(p.pattern.cols()) + ", expected " +
                     std::to_string(p.a.rows()) + "x" + std::to_string(p.b.rows()));
  }
  if (p.pattern.row_offsets().size() != p.pattern.rows() + 1 ||
      static_cast<std::size_t>(p.pattern.row_offsets().back()) != p.pattern.nnz()) {
    throw ShapeError("sddmm: inconsistent CSR arrays");
  }
}

/// Dot product with `VW` lanes: lane l sums a[k]*b[k] for k ≡ l (mod VW)
/// over the vectorizable prefix, lanes are combined by a fixed pairwise
/// tree, then the K % VW tail is added in order.
template <int VW, class T>
inline float lane_dot(const T* a, const T* b, std::size_t k) noexcept {
  simd::Vec<VW> acc = simd::zero<VW>();
  std::size_t i = 0;
  for (; i + VW <= k; i += VW) acc += simd::load<VW>(a + i) * simd::load<VW>(b + i);
  float r = simd::reduce<VW>(acc);
  for (; i < k; ++i) r += to_float(a[i]) * to_float(b[i]);
  return r;
}

template <int VW, class T, class I>
void run_sddmm(const SddmmProblem<T, I>& p, const TileConfig& cfg, const SddmmOptions& opts,
               const std::int32_t* order, AlignedVector<T>& out) {
  const auto& pat = p.pattern;
  const auto x = static_cast<std::size_t>(cfg.block_items_x);
  const auto y = static_cast<std::size_t>(cfg.block_items_y);
  // A row holds at most pat.cols() nonzeros; launch enough strips for that
  // and let surplus tasks exit immediately.
  const std::size_t strips = std::max<std::size_t>(1, (pat.cols() + x - 1) / x);
  const std::size_t groups = (pat.rows() + y - 1) / y;
  const std::size_t k = p.a.cols();

  ThreadPool& pool = opts.pool ? *opts.pool : default_pool();
  pool.parallel_for(groups * strips, [&](std::size_t task) {
    const std::size_t group = task / strips;
    const std::size_t strip = task % strips;
    for (std::size_t s = group * y; s < std::min(pat.rows(), (group + 1) * y); ++s) {
      const std::size_t row = order ? static_cast<std::size_t>(order[s]) : s;
      const std::size_t begin = static_cast<std::size_t>(pat.row_begin(row)) + strip * x;
      const std::size_t end = static_cast<std::size_t>(pat.row_end(row));
      if (begin >= end) continue;  // early exit
      const T* a_row = p.a.data() + row * k;
      for (std::size_t j = begin; j < std::min(end, begin + x); ++j) {
        const auto col = static_cast<std::size_t>(pat.col_indices()[j]);
        float v = lane_dot<VW>(a_row, p.b.data() + col * k, k);
        if (opts.scale_values) v *= to_float(pat.values()[j]);
        out[j] = from_float<T>(v);
      }
    }
  });
}

}  // namespace detail

/// General SDDMM. The output shares the pattern's structure arrays.
template <class T, class I>
CsrMatrix<T, I> sddmm_general(const SddmmProblem<T, I>& p, const TileConfig& cfg,
                              const SddmmOptions& opts = {}) {
  check_tile_config(cfg);
  detail::check_sddmm(p);
  if (opts.scale_values && p.pattern.values().size() != p.pattern.nnz()) {
    throw ShapeError("sddmm: scale_values requires pattern values");
  }
  const std::int32_t* order = nullptr;
  if (opts.swizzle) {
    if (opts.swizzle->order.size() != p.pattern.rows() || !opts.swizzle->is_permutation()) {
      throw ShapeError("sddmm: row swizzle is not a permutation of the pattern rows");
    }
    order = opts.swizzle->order.data();
  }

  AlignedVector<T> values(p.pattern.nnz());
  switch (cfg.vector_width) {
    case 4: detail::run_sddmm<4>(p, cfg, opts, order, values); break;
    case 2: detail::run_sddmm<2>(p, cfg, opts, order, values); break;
    default: detail::run_sddmm<1>(p, cfg, opts, order, values); break;
  }
  const auto offsets = p.pattern.row_offsets();
  const auto indices = p.pattern.col_indices();
  return CsrMatrix<T, I>(p.pattern.rows(), p.pattern.cols(),
                         AlignedVector<Offset>(offsets.begin(), offsets.end()),
                         AlignedVector<I>(indices.begin(), indices.end()), std::move(values));
}

/// D = (A Bᵀ) ⊙ 𝕀[pattern]; pattern values are ignored.
template <class T, class I>
CsrMatrix<T, I> sddmm(const SddmmProblem<T, I>& p, const TileConfig& cfg,
                      SddmmOptions opts = {}) {
  opts.scale_values = false;
  return sddmm_general(p, cfg, opts);
}

/// Per-nonzero dot product accumulated in `Accum` in index order and
/// rounded once. Accum = double is the test oracle.
template <class Accum = double, class T, class I>
CsrMatrix<T, I> sddmm_reference(const SddmmProblem<T, I>& p, bool scale_values = false) {
  detail::check_sddmm(p);
  const auto& pat = p.pattern;
  const std::size_t k = p.a.cols();
  AlignedVector<T> values(pat.nnz());
  for (std::size_t r = 0; r < pat.rows(); ++r) {
    for (Offset j = pat.row_begin(r); j < pat.row_end(r); ++j) {
      const auto col = static_cast<std::size_t>(pat.col_indices()[j]);
      Accum acc = 0;
      for (std::size_t i = 0; i < k; ++i) {
        acc += static_cast<Accum>(to_float(p.a(r, i))) * static_cast<Accum>(to_float(p.b(col, i)));
      }
      if (scale_values) acc *= static_cast<Accum>(to_float(pat.values()[j]));
      values[j] = from_float<T>(static_cast<float>(acc));
    }
  }
  const auto offsets = pat.row_offsets();
  const auto indices = pat.col_indices();
  return CsrMatrix<T, I>(pat.rows(), pat.cols(),
                         AlignedVector<Offset>(offsets.begin(), offsets.end()),
                         AlignedVector<I>(indices.begin(), indices.end()), std::move(values));
}

}  // namespace tilesparse

#endif  // TILESPARSE_SDDMM_HPP_
