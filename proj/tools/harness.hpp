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

// Timing, oracle gating and ablation used by the command line tool.
// Depends only on the library so other programs can reuse it.

#ifndef TILESPARSE_TOOLS_HARNESS_HPP_
#define TILESPARSE_TOOLS_HARNESS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tilesparse/tilesparse.hpp"

namespace tilesparse::harness {

struct TimingPlan {
  int warmup = 3;
  int repeats = 20;
};

struct Timing {
  double median_ns = 0.0;
  double min_ns = 0.0;
  double max_ns = 0.0;
  /// (max - min) / median over the timed repeats.
  double spread = 0.0;
  int repeats = 0;
};

inline Timing time_it(const std::function<void()>& fn, const TimingPlan& plan) {
  for (int i = 0; i < plan.warmup; ++i) fn();
  std::vector<double> ns(static_cast<std::size_t>(std::max(1, plan.repeats)));
  for (auto& t : ns) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    t = std::chrono::duration<double, std::nano>(stop - start).count();
  }
  std::sort(ns.begin(), ns.end());
  Timing r;
  const std::size_t n = ns.size();
  r.median_ns = n % 2 ? ns[n / 2] : 0.5 * (ns[n / 2 - 1] + ns[n / 2]);
  r.min_ns = ns.front();
  r.max_ns = ns.back();
  r.spread = r.median_ns > 0.0 ? (r.max_ns - r.min_ns) / r.median_ns : 0.0;
  r.repeats = static_cast<int>(n);
  return r;
}

/// Effective GFLOP/s: 2 flops per stored nonzero per dense column.
inline double gflops(std::size_t nnz, std::size_t dense_dim, double ns) {
  return ns > 0.0 ? 2.0 * static_cast<double>(nnz) * static_cast<double>(dense_dim) / ns : 0.0;
}

// ---------------------------------------------------------------------------
// f64 oracles with per-element magnitude for relative error
// ---------------------------------------------------------------------------

/// Largest |got - exact| / sum|a_ij b_jn| over the output of A B.
template <class T, class I>
double spmm_error(const CsrMatrix<T, I>& a, const DenseMatrix<T>& b, const DenseMatrix<T>& got) {
  const std::size_t n = b.cols();
  std::vector<double> acc(n), mag(n);
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(mag.begin(), mag.end(), 0.0);
    for (Offset j = a.row_begin(r); j < a.row_end(r); ++j) {
      const double v = to_float(a.values()[j]);
      const auto col = static_cast<std::size_t>(a.col_indices()[j]);
      for (std::size_t c = 0; c < n; ++c) {
        const double p = v * static_cast<double>(to_float(b(col, c)));
        acc[c] += p;
        mag[c] += std::fabs(p);
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      const double err = std::fabs(static_cast<double>(to_float(got(r, c))) - acc[c]) /
                         std::max(mag[c], 1e-30);
      if (!(err <= worst)) worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
    }
  }
  return worst;
}

/// Same metric for (A Bᵀ) ⊙ pattern.
template <class T, class I>
double sddmm_error(const DenseMatrix<T>& a, const DenseMatrix<T>& b, const CsrMatrix<T, I>& got) {
  double worst = 0.0;
  const std::size_t k = a.cols();
  for (std::size_t r = 0; r < got.rows(); ++r) {
    for (Offset j = got.row_begin(r); j < got.row_end(r); ++j) {
      const auto col = static_cast<std::size_t>(got.col_indices()[j]);
      double acc = 0.0, mag = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double p = static_cast<double>(to_float(a(r, i))) * to_float(b(col, i));
        acc += p;
        mag += std::fabs(p);
      }
      const double err =
          std::fabs(static_cast<double>(to_float(got.values()[j])) - acc) / std::max(mag, 1e-30);
      if (!(err <= worst)) worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Ablation
// ---------------------------------------------------------------------------

inline constexpr double kF32Tolerance = 1e-5;

struct AblationRow {
  std::string kernel;
  std::string toggle;  // "baseline" or "-<optimization>"
  TileConfig config;
  double max_error = 0.0;
  bool verified = false;
  Timing timing;  // left empty when not verified
  double gflops = 0.0;
  double relative_performance = 0.0;  // percent of baseline throughput
};

namespace detail {

inline void fill_relative(std::vector<AblationRow>& rows) {
  const double base = rows.front().verified ? rows.front().timing.median_ns : 0.0;
  for (auto& r : rows) {
    if (r.verified && base > 0.0 && r.timing.median_ns > 0.0) {
      r.relative_performance = 100.0 * base / r.timing.median_ns;
    }
  }
}

}  // namespace detail

/// Full SpMM kernel, then each optimization switched off on its own:
/// row swizzle, vector width, unrolled residue, index pre-scaling. Every
/// variant is checked against the f64 oracle before it is timed.
inline std::vector<AblationRow> ablate_spmm(const CsrMatrix<float>& a, const DenseMatrix<float>& b,
                                            const TileConfig& base, const TimingPlan& plan,
                                            ThreadPool* pool = nullptr) {
  const RowSwizzle swizzle = build_row_swizzle(a);
  struct Variant {
    const char* name;
    TileConfig cfg;
    SpmmOptions opts;
  };
  SpmmOptions full;
  full.swizzle = &swizzle;
  full.pool = pool;
  std::vector<Variant> variants{{"baseline", base, full}};
  {
    Variant v{"-load-balance", base, full};
    v.opts.swizzle = nullptr;
    variants.push_back(v);
  }
  {
    Variant v{"-vector", base, full};
    v.cfg.vector_width = 1;
    variants.push_back(v);
  }
  {
    Variant v{"-residue-unroll", base, full};
    v.opts.residue_unroll = false;
    variants.push_back(v);
  }
  {
    Variant v{"-index-prescale", base, full};
    v.opts.prescale = false;
    variants.push_back(v);
  }

  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    AblationRow row;
    row.kernel = "spmm";
    row.toggle = v.name;
    row.config = v.cfg;
    row.max_error = spmm_error(a, b, spmm(a, b, v.cfg, v.opts));
    row.verified = row.max_error <= kF32Tolerance;
    if (row.verified) {
      row.timing = time_it([&] { (void)spmm(a, b, v.cfg, v.opts); }, plan);
      row.gflops = gflops(a.nnz(), b.cols(), row.timing.median_ns);
    }
    rows.push_back(row);
  }
  detail::fill_relative(rows);
  return rows;
}

/// SDDMM counterpart: baseline, no row swizzle, scalar lanes.
inline std::vector<AblationRow> ablate_sddmm(const CsrMatrix<float>& pattern,
                                             const DenseMatrix<float>& lhs,
                                             const DenseMatrix<float>& rhs, const TileConfig& base,
                                             const TimingPlan& plan, ThreadPool* pool = nullptr) {
  const RowSwizzle swizzle = build_row_swizzle(pattern);
  const SddmmProblem<float> prob{lhs, rhs, pattern};
  struct Variant {
    const char* name;
    TileConfig cfg;
    SddmmOptions opts;
  };
  SddmmOptions full;
  full.swizzle = &swizzle;
  full.pool = pool;
  std::vector<Variant> variants{{"baseline", base, full}};
  {
    Variant v{"-load-balance", base, full};
    v.opts.swizzle = nullptr;
    variants.push_back(v);
  }
  {
    Variant v{"-vector", base, full};
    v.cfg.vector_width = 1;
    variants.push_back(v);
  }

  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    AblationRow row;
    row.kernel = "sddmm";
    row.toggle = v.name;
    row.config = v.cfg;
    row.max_error = sddmm_error(lhs, rhs, sddmm(prob, v.cfg, v.opts));
    row.verified = row.max_error <= kF32Tolerance;
    if (row.verified) {
      row.timing = time_it([&] { (void)sddmm(prob, v.cfg, v.opts); }, plan);
      row.gflops = gflops(pattern.nnz(), lhs.cols(), row.timing.median_ns);
    }
    rows.push_back(row);
  }
  detail::fill_relative(rows);
  return rows;
}

}  // namespace tilesparse::harness

#endif  // TILESPARSE_TOOLS_HARNESS_HPP_
