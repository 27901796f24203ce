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

#ifndef TILESPARSE_ATTENTION_HPP_
#define TILESPARSE_ATTENTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/random.hpp"
#include "tilesparse/sddmm.hpp"
#include "tilesparse/spmm.hpp"
#include "tilesparse/thread_pool.hpp"
#include "tilesparse/tile_config.hpp"

namespace tilesparse {

/// Causal attention mask: a dense band of `band` positions ending at the
/// diagonal plus random older positions, sampled with probability
/// proportional to 1 / distance.
struct AttentionMaskSpec {
  std::size_t seq_len = 0;
  std::size_t band = 256;
  /// Fraction of off-band causal positions left out, in expectation.
  double off_diag_sparsity = 0.95;
  std::uint64_t seed = 0;
  bool causal = true;
};

/// Builds the mask (values 1.0).
///
/// Row i stores every j in [max(0, i - band + 1), i]. Each older j is kept
/// independently with probability min(1, p_i / (i - j)), where p_i makes
/// the expected number of kept off-band entries equal
/// (1 - off_diag_sparsity) * (i - band + 1). Non-causal masks mirror the
/// band and the sampling onto j > i.
inline CsrMatrix<float> generate_mask(const AttentionMaskSpec& spec) {
  if (spec.band < 1) throw Error("generate_mask: band must be >= 1");
  if (!(spec.off_diag_sparsity >= 0.0 && spec.off_diag_sparsity <= 1.0)) {
    throw Error("generate_mask: off_diag_sparsity must be in [0, 1]");
  }
  const std::size_t n = spec.seq_len;
  const double density = 1.0 - spec.off_diag_sparsity;
  Rng rng(spec.seed);

  // harmonic[d] = sum_{t=1..d} 1/t
  std::vector<double> harmonic(n + 1, 0.0);
  for (std::size_t d = 1; d <= n; ++d) harmonic[d] = harmonic[d - 1] + 1.0 / static_cast<double>(d);

  // Off-band distances d in [band, max_d]; returns p with sum p/d == density*count.
  auto scale_for = [&](std::size_t max_d) {
    if (max_d < spec.band) return 0.0;
    const double count = static_cast<double>(max_d - spec.band + 1);
    const double h = harmonic[max_d] - harmonic[spec.band - 1];
    return density * count / h;
  };
  auto keep = [&](double p, std::size_t d) {
    if (p <= 0.0) return false;
    const double prob = std::min(1.0, p / static_cast<double>(d));
    return rng.uniform() < prob;
  };

  AlignedVector<Offset> offsets(n + 1, 0);
  AlignedVector<std::int32_t> indices;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t band_lo = i + 1 >= spec.band ? i + 1 - spec.band : 0;
    const double p_left = scale_for(i);
    for (std::size_t j = 0; j < band_lo; ++j) {
      if (keep(p_left, i - j)) indices.push_back(static_cast<std::int32_t>(j));
    }
    for (std::size_t j = band_lo; j <= i; ++j) indices.push_back(static_cast<std::int32_t>(j));
    if (!spec.causal) {
      const std::size_t band_hi = std::min(n - 1, i + spec.band - 1);
      for (std::size_t j = i + 1; j <= band_hi; ++j) {
        indices.push_back(static_cast<std::int32_t>(j));
      }
      const double p_right = scale_for(n - 1 - i);
      for (std::size_t j = band_hi + 1; j < n; ++j) {
        if (keep(p_right, j - i)) indices.push_back(static_cast<std::int32_t>(j));
      }
    }
    offsets[i + 1] = static_cast<Offset>(indices.size());
  }
  AlignedVector<float> values(indices.size(), 1.0f);
  return CsrMatrix<float>(n, n, std::move(offsets), std::move(indices), std::move(values));
}

/// Row-wise softmax over the stored entries of `m` after multiplying by
/// `scale`. The row maximum is subtracted before exponentiation. Empty rows
/// stay empty; the structure is unchanged.
template <class T, class I>
CsrMatrix<T, I> sparse_softmax(const CsrMatrix<T, I>& m, double scale = 1.0,
                               ThreadPool* pool = nullptr) {
  AlignedVector<T> out(m.nnz());
  const auto vals = m.values();
  ThreadPool& p = pool ? *pool : default_pool();
  p.parallel_for(m.rows(), [&](std::size_t r) {
    const Offset b = m.row_begin(r);
    const Offset e = m.row_end(r);
    if (b == e) return;
    double mx = -std::numeric_limits<double>::infinity();
    for (Offset j = b; j < e; ++j) mx = std::max(mx, scale * to_float(vals[j]));
    double sum = 0.0;
    for (Offset j = b; j < e; ++j) sum += std::exp(scale * to_float(vals[j]) - mx);
    for (Offset j = b; j < e; ++j) {
      out[j] = from_float<T>(static_cast<float>(std::exp(scale * to_float(vals[j]) - mx) / sum));
    }
  });
  return m.with_values(std::move(out));
}

struct AttentionConfig {
  TileConfig sddmm;
  TileConfig spmm;

  /// Default kernel selection for head sizes `d_k` and `d_v`.
  static AttentionConfig for_dims(std::size_t d_k, std::size_t d_v) {
    return {default_tile_config(d_k, KernelKind::kSddmm), default_tile_config(d_v)};
  }
};

/// Softmax(Q Kᵀ / sqrt(d_k)) V restricted to `mask`: SDDMM, sparse softmax,
/// then SpMM. Rows with no stored entry produce zero outputs.
inline DenseMatrix<float> sparse_attention(const DenseMatrix<float>& q,
                                           const DenseMatrix<float>& k,
                                           const DenseMatrix<float>& v,
                                           const CsrMatrix<float>& mask,
                                           const AttentionConfig& cfg,
                                           ThreadPool* pool = nullptr) {
  if (q.cols() != k.cols() || q.rows() != mask.rows() || k.rows() != mask.cols() ||
      v.rows() != k.rows()) {
    throw ShapeError("sparse_attention: inconsistent shapes (q " + std::to_string(q.rows()) +
                     "x" + std::to_string(q.cols()) + ", k " + std::to_string(k.rows()) + "x" +
                     std::to_string(k.cols()) + ", v " + std::to_string(v.rows()) + "x" +
                     std::to_string(v.cols()) + ", mask " + std::to_string(mask.rows()) + "x" +
                     std::to_string(mask.cols()) + ")");
  }
  if (q.cols() == 0) throw ShapeError("sparse_attention: d_k must be >= 1");
  SddmmOptions sopts;
  sopts.pool = pool;
  const auto scores = sddmm(SddmmProblem<float>{q, k, mask}, cfg.sddmm, sopts);
  const auto probs = sparse_softmax(scores, 1.0 / std::sqrt(static_cast<double>(q.cols())), pool);
  SpmmOptions opts;
  opts.pool = pool;
  return spmm(probs, v, cfg.spmm, opts);
}

inline DenseMatrix<float> sparse_attention(const DenseMatrix<float>& q,
                                           const DenseMatrix<float>& k,
                                           const DenseMatrix<float>& v,
                                           const CsrMatrix<float>& mask) {
  return sparse_attention(q, k, v, mask, AttentionConfig::for_dims(q.cols(), v.cols()));
}

}  // namespace tilesparse

#endif  // TILESPARSE_ATTENTION_HPP_
