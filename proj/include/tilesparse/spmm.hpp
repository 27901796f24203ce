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

#ifndef TILESPARSE_SPMM_HPP_
#define TILESPARSE_SPMM_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "tilesparse/aligned.hpp"
#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/half.hpp"
#include "tilesparse/row_swizzle.hpp"
#include "tilesparse/simd.hpp"
#include "tilesparse/thread_pool.hpp"
#include "tilesparse/tile_config.hpp"

namespace tilesparse {

/// Per-output post-processing fused into the final store.
struct Epilogue {
  enum class Kind { kNone, kBias, kBiasRelu };

  Kind kind = Kind::kNone;
  std::vector<float> bias;  // one entry per output row

  static Epilogue none() { return {}; }
  static Epilogue with_bias(std::vector<float> b) { return {Kind::kBias, std::move(b)}; }
  static Epilogue bias_relu(std::vector<float> b) { return {Kind::kBiasRelu, std::move(b)}; }
};

/// Optional behaviour of spmm(). The boolean switches exist so each
/// optimization can be disabled on its own; none of them changes results.
struct SpmmOptions {
  /// Align each row start to the vector width and mask the borrowed prefix.
  bool roma = true;
  /// Stage column indices pre-multiplied by B's row stride. Ignored for
  /// 16-bit indices.
  bool prescale = true;
  /// Zero-pad the residue tile and run it 4x unrolled without bounds checks
  /// instead of a bounds-checked scalar loop.
  bool residue_unroll = true;
  /// Row processing order. Falls back to the matrix's attached swizzle, then
  /// to natural order.
  const RowSwizzle* swizzle = nullptr;
  Epilogue epilogue;
  /// Defaults to default_pool().
  ThreadPool* pool = nullptr;
};

namespace detail {

template <int VW, class T, class I, bool Prescaled>
class SpmmKernel {
 public:
  SpmmKernel(const CsrMatrix<T, I>& a, const DenseMatrix<T>& b, const TileConfig& cfg,
             const SpmmOptions& opts, const std::int32_t* order, DenseMatrix<T>& c)
      : a_(a), b_(b), cfg_(cfg), opts_(opts), order_(order), c_(c) {
    n_tiles_ = (b.cols() + static_cast<std::size_t>(cfg.block_items_x) - 1) /
               static_cast<std::size_t>(cfg.block_items_x);
    row_groups_ = (a.rows() + static_cast<std::size_t>(cfg.block_items_y) - 1) /
                  static_cast<std::size_t>(cfg.block_items_y);
  }

  std::size_t num_tasks() const noexcept { return n_tiles_ * row_groups_; }

  /// Task index follows the block index convention: column tile fastest.
  void run_task(std::size_t task) const {
    thread_local AlignedVector<float> staged_values;
    thread_local AlignedVector<std::int32_t> staged_indices;
    thread_local AlignedVector<float> acc;
    const auto k = static_cast<std::size_t>(cfg_.block_items_k);
    const auto x = static_cast<std::size_t>(cfg_.block_items_x);
    if (staged_values.size() < k) {
      staged_values.resize(k);
      staged_indices.resize(k);
    }
    if (acc.size() < x) acc.resize(x);

    const std::size_t group = task / n_tiles_;
    const std::size_t tile = task % n_tiles_;
    const std::size_t n0 = tile * x;
    const int width = static_cast<int>(std::min(x, b_.cols() - n0));

    for (int y = 0; y < cfg_.block_items_y; ++y) {
      const std::size_t slot = group * static_cast<std::size_t>(cfg_.block_items_y) +
                               static_cast<std::size_t>(y);
      if (slot >= a_.rows()) break;
      const std::size_t row = order_ ? static_cast<std::size_t>(order_[slot]) : slot;
      compute_row(row, n0, width, staged_values.data(), staged_indices.data(), acc.data());
      store_row(row, n0, width, acc.data());
    }
  }

 private:
  using V = simd::Vec<VW>;

  void compute_row(std::size_t row, std::size_t n0, int width, float* sv, std::int32_t* si,
                   float* acc) const {
    std::fill(acc, acc + width, 0.0f);
    std::int64_t offset = a_.row_begin(row);
    std::int64_t nnz = a_.row_end(row) - offset;
    if (nnz == 0) return;

    int prefix = 0;
    if (opts_.roma) {
      const RomaAdjustment adj = roma_align(offset, nnz, VW);
      offset = adj.aligned_offset;
      nnz = adj.adjusted_nnz;
      prefix = adj.mask_prefix_len;
    }

    const int k_tile = cfg_.block_items_k;
    const T* b_base = b_.data() + n0;
    bool first = true;

    // Main loop over full tiles.
    for (; nnz >= k_tile; nnz -= k_tile, offset += k_tile) {
      stage(offset, k_tile, sv, si);
      if (first) mask_prefix(sv, prefix);
      first = false;
      accumulate<true>(sv, si, k_tile, b_base, width, acc);
    }
    if (nnz == 0) return;

    // Residue.
    const int rem = static_cast<int>(nnz);
    if (opts_.residue_unroll) {
      // Zeroed slots contribute +0 * B[0][:], which never changes a sum.
      const int padded = (rem + 3) & ~3;
      std::fill(sv, sv + padded, 0.0f);
      std::fill(si, si + padded, 0);
      stage(offset, rem, sv, si);
      if (first) mask_prefix(sv, prefix);
      accumulate<true>(sv, si, padded, b_base, width, acc);
    } else {
      stage(offset, rem, sv, si);
      if (first) mask_prefix(sv, prefix);
      accumulate<false>(sv, si, rem, b_base, width, acc);
    }
  }

  static void mask_prefix(float* sv, int prefix) noexcept {
    for (int i = 0; i < prefix; ++i) sv[i] = 0.0f;
  }

  /// Copies `count` values/indices starting at `offset` into the staging
  /// buffers, `VW` elements per load where possible.
  void stage(std::int64_t offset, int count, float* sv, std::int32_t* si) const {
    const T* vals = a_.values().data() + offset;
    const I* idx = a_.col_indices().data() + offset;
    const auto stride = static_cast<std::int32_t>(b_.cols());
    int i = 0;
    for (; i + VW <= count; i += VW) {
      simd::store<VW>(sv + i, simd::load<VW>(vals + i));
      std::int32_t lane[VW];
      if constexpr (std::is_same_v<I, std::int32_t>) {
        std::memcpy(lane, idx + i, sizeof(lane));
      } else {
        for (int l = 0; l < VW; ++l) lane[l] = static_cast<std::int32_t>(idx[i + l]);
      }
      for (int l = 0; l < VW; ++l) si[i + l] = Prescaled ? lane[l] * stride : lane[l];
    }
    for (; i < count; ++i) {
      sv[i] = to_float(vals[i]);
      const auto c = static_cast<std::int32_t>(idx[i]);
      si[i] = Prescaled ? c * stride : c;
    }
  }

  const T* b_row(const T* b_base, std::int32_t staged) const noexcept {
    if constexpr (Prescaled) {
      return b_base + staged;
    } else {
      return b_base + static_cast<std::ptrdiff_t>(staged) * static_cast<std::ptrdiff_t>(b_.cols());
    }
  }

  /// acc[c] += sv[k] * B[col(k)][n0 + c] for k in [0, count), in order.
  template <bool Unrolled>
  void accumulate(const float* sv, const std::int32_t* si, int count, const T* b_base, int width,
                  float* acc) const {
    int c = 0;
    for (; c + 4 * VW <= width; c += 4 * VW) {
      V a0 = simd::load<VW>(acc + c);
      V a1 = simd::load<VW>(acc + c + VW);
      V a2 = simd::load<VW>(acc + c + 2 * VW);
      V a3 = simd::load<VW>(acc + c + 3 * VW);
      auto body = [&](int k) {
        const float v = sv[k];
        const T* br = b_row(b_base, si[k]) + c;
        a0 += v * simd::load<VW>(br);
        a1 += v * simd::load<VW>(br + VW);
        a2 += v * simd::load<VW>(br + 2 * VW);
        a3 += v * simd::load<VW>(br + 3 * VW);
      };
      if constexpr (Unrolled) {
        for (int k = 0; k < count; k += 4) {
          body(k);
          body(k + 1);
          body(k + 2);
          body(k + 3);
        }
      } else {
        for (int k = 0; k < count; ++k) body(k);
      }
      simd::store<VW>(acc + c, a0);
      simd::store<VW>(acc + c + VW, a1);
      simd::store<VW>(acc + c + 2 * VW, a2);
      simd::store<VW>(acc + c + 3 * VW, a3);
    }
    for (; c + VW <= width; c += VW) {
      V a0 = simd::load<VW>(acc + c);
      for (int k = 0; k < count; ++k) a0 += sv[k] * simd::load<VW>(b_row(b_base, si[k]) + c);
      simd::store<VW>(acc + c, a0);
    }
    // Predicated tail of a partial column tile.
    for (; c < width; ++c) {
      float a0 = acc[c];
      for (int k = 0; k < count; ++k) a0 += sv[k] * to_float(b_row(b_base, si[k])[c]);
      acc[c] = a0;
    }
  }

  void store_row(std::size_t row, std::size_t n0, int width, const float* acc) const {
    T* out = c_.data() + row * c_.cols() + n0;
    switch (opts_.epilogue.kind) {
      case Epilogue::Kind::kNone:
        for (int i = 0; i < width; ++i) out[i] = from_float<T>(acc[i]);
        break;
      case Epilogue::Kind::kBias: {
        const float bias = opts_.epilogue.bias[row];
        for (int i = 0; i < width; ++i) out[i] = from_float<T>(acc[i] + bias);
        break;
      }
      case Epilogue::Kind::kBiasRelu: {
        const float bias = opts_.epilogue.bias[row];
        for (int i = 0; i < width; ++i) out[i] = from_float<T>(std::max(0.0f, acc[i] + bias));
        break;
      }
    }
  }

  const CsrMatrix<T, I>& a_;
  const DenseMatrix<T>& b_;
  const TileConfig& cfg_;
  const SpmmOptions& opts_;
  const std::int32_t* order_;
  DenseMatrix<T>& c_;
  std::size_t n_tiles_ = 0;
  std::size_t row_groups_ = 0;
};

template <int VW, class T, class I, bool Prescaled>
void run_spmm(const CsrMatrix<T, I>& a, const DenseMatrix<T>& b, const TileConfig& cfg,
              const SpmmOptions& opts, const std::int32_t* order, DenseMatrix<T>& c) {
  SpmmKernel<VW, T, I, Prescaled> kernel(a, b, cfg, opts, order, c);
  ThreadPool& pool = opts.pool ? *opts.pool : default_pool();
  pool.parallel_for(kernel.num_tasks(), [&](std::size_t t) { kernel.run_task(t); });
}

template <class T, class I>
const std::int32_t* resolve_order(const CsrMatrix<T, I>& a, const RowSwizzle* swizzle) {
  const RowSwizzle* s = swizzle ? swizzle : (a.swizzle() ? &*a.swizzle() : nullptr);
  if (!s) return nullptr;
  if (s->order.size() != a.rows() || !s->is_permutation()) {
    throw ShapeError("row swizzle is not a permutation of the " + std::to_string(a.rows()) +
                     " matrix rows");
  }
  return s->order.data();
}

}  // namespace detail

/// Tiled sparse x dense product C = A * B.
///
/// Every output element is accumulated in float, in ascending nonzero order,
/// and written by exactly one task, so the result does not depend on the
/// tile configuration, the swizzle, the enabled optimizations or the number
/// of worker threads.
template <class T, class I>
DenseMatrix<T> spmm(const CsrMatrix<T, I>& a, const DenseMatrix<T>& b, const TileConfig& cfg,
                    const SpmmOptions& opts = {}) {
  check_tile_config(cfg);
  if (a.cols() != b.rows()) {
    throw ShapeError("spmm: A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " but B has " + std::to_string(b.rows()) + " rows");
  }
  if (b.cols() == 0) throw ShapeError("spmm: B must have at least one column");
  if (a.row_offsets().size() != a.rows() + 1 ||
      static_cast<std::size_t>(a.row_offsets().back()) != a.nnz() ||
      a.values().size() != a.nnz()) {
    throw ShapeError("spmm: inconsistent CSR arrays");
  }
  if (opts.epilogue.kind != Epilogue::Kind::kNone && opts.epilogue.bias.size() != a.rows()) {
    throw ShapeError("spmm: bias has " + std::to_string(opts.epilogue.bias.size()) +
                     " entries, expected " + std::to_string(a.rows()));
  }
  const std::int32_t* order = detail::resolve_order(a, opts.swizzle);

  bool prescale = opts.prescale && index_width_of<I> == IndexWidth::k32;
  if (prescale && a.cols() > 0) {
    const auto max_scaled = static_cast<std::int64_t>(a.cols() - 1) *
                            static_cast<std::int64_t>(b.cols());
    if (max_scaled > std::numeric_limits<std::int32_t>::max()) {
      throw IndexOverflowError("spmm: pre-scaled column index " + std::to_string(max_scaled) +
                               " overflows 32 bits; disable index pre-scaling");
    }
  }

  DenseMatrix<T> c(a.rows(), b.cols());
  auto dispatch = [&]<int VW>() {
    if (prescale) {
      detail::run_spmm<VW, T, I, true>(a, b, cfg, opts, order, c);
    } else {
      detail::run_spmm<VW, T, I, false>(a, b, cfg, opts, order, c);
    }
  };
  switch (cfg.vector_width) {
    case 4: dispatch.template operator()<4>(); break;
    case 2: dispatch.template operator()<2>(); break;
    default: dispatch.template operator()<1>(); break;
  }
  return c;
}

/// Mixed-precision SpMM: half values and 16-bit column indices in, float
/// accumulation, half out (round to nearest even). Index pre-scaling is
/// never applied on this path.
inline DenseMatrix<half> spmm_mixed(const CsrMatrix<half, std::uint16_t>& a,
                                    const DenseMatrix<half>& b, const TileConfig& cfg,
                                    SpmmOptions opts = {}) {
  if (a.cols() > 65535) {
    throw IndexOverflowError("spmm_mixed: 16-bit indices require cols <= 65535");
  }
  opts.prescale = false;
  return spmm(a, b, cfg, opts);
}

/// Row-sequential CSR x dense product accumulating in `Accum`, rounded once
/// to the output precision. With Accum = double this is the test oracle;
/// with Accum = float it reproduces the kernels' summation order exactly.
template <class Accum = double, class T, class I>
DenseMatrix<T> spmm_reference(const CsrMatrix<T, I>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("spmm_reference: A is " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " but B has " + std::to_string(b.rows()) +
                     " rows");
  }
  DenseMatrix<T> c(a.rows(), b.cols());
  std::vector<Accum> acc(b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), Accum(0));
    for (Offset j = a.row_begin(r); j < a.row_end(r); ++j) {
      const Accum v = static_cast<Accum>(to_float(a.values()[j]));
      const T* brow = b.data() + static_cast<std::size_t>(a.col_indices()[j]) * b.cols();
      for (std::size_t n = 0; n < b.cols(); ++n) {
        acc[n] += v * static_cast<Accum>(to_float(brow[n]));
      }
    }
    for (std::size_t n = 0; n < b.cols(); ++n) {
      c(r, n) = from_float<T>(static_cast<float>(acc[n]));
    }
  }
  return c;
}

}  // namespace tilesparse

#endif  // TILESPARSE_SPMM_HPP_
