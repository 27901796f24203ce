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

#ifndef TILESPARSE_LOAD_BALANCE_HPP_
#define TILESPARSE_LOAD_BALANCE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/random.hpp"
#include "tilesparse/row_swizzle.hpp"
#include "tilesparse/stats.hpp"
#include "tilesparse/tile_config.hpp"

namespace tilesparse {

// ---------------------------------------------------------------------------
// Row swizzle
// ---------------------------------------------------------------------------

/// Rows sorted by descending length, ties by ascending row index. Taking
/// consecutive groups of this order bundles similar rows into one task, and
/// issuing the heaviest groups first bins work evenly across processors.
template <class T, class I>
RowSwizzle build_row_swizzle(const CsrMatrix<T, I>& m) {
  RowSwizzle s;
  s.order.resize(m.rows());
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(), [&](std::int32_t a, std::int32_t b) {
    return m.row_length(static_cast<std::size_t>(a)) > m.row_length(static_cast<std::size_t>(b));
  });
  return s;
}

// ---------------------------------------------------------------------------
// Thread block scheduler model
// ---------------------------------------------------------------------------

/// Volta-style GPU: `num_sms` SMs arranged as `tpc_pairs` TPCs of two,
/// each holding up to `blocks_per_sm` resident blocks.
struct SchedulerModel {
  int num_sms = 80;
  int blocks_per_sm = 1;
  int tpc_pairs = 40;

  static SchedulerModel with_sms(int sms, int blocks_per_sm = 1) {
    return {sms, blocks_per_sm, sms / 2};
  }

  void check() const {
    if (tpc_pairs < 1 || num_sms != 2 * tpc_pairs) {
      throw Error("scheduler model needs num_sms == 2 * tpc_pairs (got " +
                  std::to_string(num_sms) + " SMs, " + std::to_string(tpc_pairs) + " pairs)");
    }
    if (blocks_per_sm < 1) throw Error("scheduler model needs blocks_per_sm >= 1");
  }
};

/// SM receiving first-wave block `block_idx`:
/// 2 * (block_idx mod pairs) + (block_idx / pairs) mod 2.
inline constexpr int sm_index(std::int64_t block_idx, const SchedulerModel& model) noexcept {
  const std::int64_t pairs = model.tpc_pairs;
  return static_cast<int>(2 * (block_idx % pairs) + (block_idx / pairs) % 2);
}

struct ScheduleReport {
  std::vector<double> per_sm_finish;  // last completion time on each SM
  std::vector<double> per_sm_work;    // busy time summed over the SM's slots
  std::vector<double> per_slot_finish;
  double makespan = 0.0;
  /// Mean completion time over all resident-block slots; equals the mean
  /// over SMs when blocks_per_sm is 1.
  double mean_finish = 0.0;
  /// makespan / mean_finish; 1.0 when there is no work.
  double imbalance = 1.0;
  std::size_t wave_size = 0;
  std::size_t wave_count = 0;
};

/// Simulates dispatch of blocks with the given costs.
///
/// The first `num_sms * blocks_per_sm` blocks are placed by sm_index().
/// Every later block, in ascending index order, goes to the slot that
/// finishes earliest (ties: lowest SM, then lowest slot). Slots on one SM
/// run independently.
inline ScheduleReport simulate_schedule(std::span<const double> costs,
                                        const SchedulerModel& model) {
  model.check();
  for (double c : costs) {
    if (!(c >= 0.0)) throw Error("simulate_schedule: block costs must be non-negative");
  }
  const auto sms = static_cast<std::size_t>(model.num_sms);
  const auto bps = static_cast<std::size_t>(model.blocks_per_sm);
  const std::size_t wave = sms * bps;

  ScheduleReport r;
  r.wave_size = wave;
  r.wave_count = (costs.size() + wave - 1) / wave;
  r.per_slot_finish.assign(wave, 0.0);
  r.per_sm_work.assign(sms, 0.0);

  std::vector<std::size_t> used(sms, 0);
  const std::size_t first = std::min(wave, costs.size());
  for (std::size_t b = 0; b < first; ++b) {
    const auto sm = static_cast<std::size_t>(sm_index(static_cast<std::int64_t>(b), model));
    const std::size_t slot = sm * bps + used[sm]++;
    r.per_slot_finish[slot] = costs[b];
    r.per_sm_work[sm] += costs[b];
  }

  using Entry = std::tuple<double, std::size_t>;  // (finish, slot); slot order = (sm, k)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (std::size_t s = 0; s < wave; ++s) ready.emplace(r.per_slot_finish[s], s);
  for (std::size_t b = first; b < costs.size(); ++b) {
    const auto [finish, slot] = ready.top();
    ready.pop();
    const double done = finish + costs[b];
    r.per_slot_finish[slot] = done;
    r.per_sm_work[slot / bps] += costs[b];
    ready.emplace(done, slot);
  }

  r.per_sm_finish.assign(sms, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < wave; ++s) {
    r.per_sm_finish[s / bps] = std::max(r.per_sm_finish[s / bps], r.per_slot_finish[s]);
    total += r.per_slot_finish[s];
  }
  r.makespan = *std::max_element(r.per_sm_finish.begin(), r.per_sm_finish.end());
  r.mean_finish = total / static_cast<double>(wave);
  r.imbalance = r.mean_finish > 0.0 ? r.makespan / r.mean_finish : 1.0;
  return r;
}

/// Number of main-loop iterations a row takes: ROMA-adjusted nonzeros over
/// block_items_k, rounded up.
template <class T, class I>
std::int64_t row_tile_count(const CsrMatrix<T, I>& m, std::size_t row, const TileConfig& cfg) {
  const std::int64_t nnz = static_cast<std::int64_t>(m.row_length(row));
  if (nnz == 0) return 0;
  const auto adj = roma_align(m.row_begin(row), nnz, cfg.vector_width);
  return (adj.adjusted_nnz + cfg.block_items_k - 1) / cfg.block_items_k;
}

/// Per-block cost of an SpMM launch with `n` output columns, in block index
/// order (column tile fastest). A block's cost is the summed tile count of
/// its `block_items_y` rows, taken in `swizzle` order when given.
template <class T, class I>
std::vector<double> spmm_block_costs(const CsrMatrix<T, I>& m, const TileConfig& cfg,
                                     std::size_t n, const RowSwizzle* swizzle = nullptr) {
  check_tile_config(cfg);
  const auto x = static_cast<std::size_t>(cfg.block_items_x);
  const auto y = static_cast<std::size_t>(cfg.block_items_y);
  const std::size_t tiles = (n + x - 1) / x;
  const std::size_t groups = (m.rows() + y - 1) / y;
  std::vector<double> costs;
  costs.reserve(tiles * groups);
  for (std::size_t g = 0; g < groups; ++g) {
    double cost = 0.0;
    for (std::size_t s = g * y; s < std::min(m.rows(), (g + 1) * y); ++s) {
      const std::size_t row = swizzle ? static_cast<std::size_t>(swizzle->order[s]) : s;
      cost += static_cast<double>(row_tile_count(m, row, cfg));
    }
    costs.insert(costs.end(), tiles, cost);
  }
  return costs;
}

struct SwizzleEvaluation {
  ScheduleReport unswizzled;
  ScheduleReport swizzled;
};

template <class T, class I>
SwizzleEvaluation evaluate_swizzle(const CsrMatrix<T, I>& m, const TileConfig& cfg,
                                   std::size_t n, const SchedulerModel& model) {
  const RowSwizzle swz = build_row_swizzle(m);
  return {simulate_schedule(spmm_block_costs(m, cfg, n), model),
          simulate_schedule(spmm_block_costs(m, cfg, n, &swz), model)};
}

struct CovSweepPoint {
  double cov = 0.0;           // requested
  double measured_cov = 0.0;  // of the generated matrix
  double unswizzled_imbalance = 1.0;
  double swizzled_imbalance = 1.0;
  std::size_t wave_count = 0;
};

/// Generates one lognormal matrix per requested CoV and compares natural
/// against swizzled scheduling with the default SpMM tile configuration.
inline std::vector<CovSweepPoint> cov_sweep(std::size_t rows, std::size_t cols, double sparsity,
                                            std::size_t n, std::span<const double> covs,
                                            const SchedulerModel& model, std::uint64_t seed,
                                            const TileConfig* cfg_override = nullptr) {
  const TileConfig cfg = cfg_override ? *cfg_override : default_tile_config(n);
  std::vector<CovSweepPoint> out;
  for (double cov : covs) {
    const auto m = random_csr(rows, cols, sparsity, seed, RowProfile::lognormal(cov));
    const auto eval = evaluate_swizzle(m, cfg, n, model);
    CovSweepPoint p;
    p.cov = cov;
    p.measured_cov = compute_stats(m).row_cov.value_or(0.0);
    p.unswizzled_imbalance = eval.unswizzled.imbalance;
    p.swizzled_imbalance = eval.swizzled.imbalance;
    p.wave_count = eval.unswizzled.wave_count;
    out.push_back(p);
  }
  return out;
}

}  // namespace tilesparse

#endif  // TILESPARSE_LOAD_BALANCE_HPP_
