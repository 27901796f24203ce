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

#ifndef TILESPARSE_RANDOM_HPP_
#define TILESPARSE_RANDOM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/stats.hpp"

namespace tilesparse {

/// Seeded generator with platform-independent output. The standard
/// distributions are implementation-defined, so only the mt19937_64 engine
/// is used directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x < limit) return x % n;
    }
  }

  /// Standard normal (Box-Muller).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Row-length distribution used by random_csr.
struct RowProfile {
  enum class Kind { kUniform, kLognormal };
  Kind kind = Kind::kUniform;
  double cov_target = 0.0;

  static RowProfile uniform() { return {}; }
  static RowProfile lognormal(double cov) { return {Kind::kLognormal, cov}; }
};

template <class T = float>
DenseMatrix<T> random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  AlignedVector<T> data(rows * cols);
  for (auto& v : data) v = from_float<T>(static_cast<float>(rng.uniform(lo, hi)));
  return DenseMatrix<T>(rows, cols, std::move(data));
}

namespace detail {

/// Integer row lengths proportional to `weights`, each clamped to
/// [0, cap], summing exactly to `total` (requires total <= n*cap).
inline std::vector<std::int64_t> apportion(const std::vector<double>& weights,
                                           std::int64_t total, std::int64_t cap) {
  const std::size_t n = weights.size();
  std::vector<std::int64_t> out(n, 0);
  if (n == 0 || total == 0) return out;
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<double> target(n);
  if (wsum <= 0.0) {
    std::fill(target.begin(), target.end(), static_cast<double>(total) / static_cast<double>(n));
  } else {
    // Find the scale f with sum(min(cap, f * w)) == total.
    auto filled = [&](double f) {
      double s = 0.0;
      for (double w : weights) s += std::min(static_cast<double>(cap), f * w);
      return s;
    };
    double lo = 0.0;
    double hi = static_cast<double>(total) / wsum;
    while (filled(hi) < static_cast<double>(total)) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (filled(mid) < static_cast<double>(total) ? lo : hi) = mid;
    }
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = std::min(static_cast<double>(cap), hi * weights[i]);
    }
  }

  // Largest-remainder rounding with the cap respected; ties by row index.
  std::int64_t assigned = 0;
  std::vector<double> frac(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::min<std::int64_t>(cap, static_cast<std::int64_t>(std::floor(target[i])));
    frac[i] = target[i] - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  while (assigned < total) {
    bool progressed = false;
    for (std::size_t i : order) {
      if (assigned == total) break;
      if (out[i] < cap) {
        ++out[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  while (assigned > total) {
    for (auto it = order.rbegin(); it != order.rend() && assigned > total; ++it) {
      if (out[*it] > 0) {
        --out[*it];
        --assigned;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Row lengths for a lognormal profile: the shape is searched so that the
/// CoV measured after clamping to [0, cols] and integer rounding is as
/// close as possible to `cov_target`, with the total fixed at `total`.
inline std::vector<std::int64_t> lognormal_row_lengths(std::size_t rows, std::size_t cols,
                                                       std::int64_t total, double cov_target,
                                                       std::uint64_t seed) {
  if (!(cov_target >= 0.0)) throw Error("random_csr: cov_target must be >= 0");
  Rng rng(seed);
  std::vector<double> z(rows);
  for (auto& v : z) v = rng.normal();
  const double zmax = rows ? *std::max_element(z.begin(), z.end()) : 0.0;
  const auto cap = static_cast<std::int64_t>(cols);

  std::vector<double> w(rows);
  auto lengths_for = [&](double sigma) {
    // exp(sigma*z - sigma*zmax) keeps the weights <= 1, avoiding overflow.
    for (std::size_t i = 0; i < rows; ++i) w[i] = std::exp(sigma * (z[i] - zmax));
    return detail::apportion(w, total, cap);
  };
  auto cov_of = [](const std::vector<std::int64_t>& l) {
    return coefficient_of_variation(l).value_or(0.0);
  };

  if (cov_target == 0.0 || rows < 2) return lengths_for(0.0);

  // For an unclamped lognormal, cov^2 = exp(sigma^2) - 1.
  double lo = 0.0;
  double hi = std::max(4.0, 2.0 * std::sqrt(std::log1p(cov_target * cov_target)));
  std::vector<std::int64_t> best = lengths_for(0.0);
  double best_err = std::abs(cov_of(best) - cov_target);
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto l = lengths_for(mid);
    const double c = cov_of(l);
    const double err = std::abs(c - cov_target);
    if (err < best_err) {
      best_err = err;
      best = l;
    }
    (c < cov_target ? lo : hi) = mid;
  }
  return best;
}

/// Random CSR matrix with values uniform in [-1, 1).
///
/// The uniform profile selects exactly round((1 - sparsity) * rows * cols)
/// cells without replacement. The lognormal profile draws row lengths from
/// lognormal_row_lengths() with the same total and places each row's
/// nonzeros uniformly. Output is a pure function of the arguments.
inline CsrMatrix<float> random_csr(std::size_t rows, std::size_t cols, double sparsity,
                                   std::uint64_t seed,
                                   RowProfile profile = RowProfile::uniform()) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw Error("random_csr: sparsity must be in [0, 1), got " + std::to_string(sparsity));
  }
  const double cells = static_cast<double>(rows) * static_cast<double>(cols);
  const auto total = static_cast<std::int64_t>(std::llround((1.0 - sparsity) * cells));
  if (total > std::numeric_limits<Offset>::max()) {
    throw IndexOverflowError("random_csr: nnz exceeds 32-bit offsets");
  }

  Rng rng(seed);
  AlignedVector<Offset> offsets(rows + 1, 0);
  AlignedVector<std::int32_t> indices;
  indices.reserve(static_cast<std::size_t>(total));

  if (profile.kind == RowProfile::Kind::kUniform) {
    // Selection sampling: visits cells in order, so indices come out sorted.
    std::int64_t needed = total;
    std::int64_t remaining = static_cast<std::int64_t>(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c, --remaining) {
        if (needed == 0) break;
        if (static_cast<double>(remaining) * rng.uniform() < static_cast<double>(needed)) {
          indices.push_back(static_cast<std::int32_t>(c));
          --needed;
        }
      }
      offsets[r + 1] = static_cast<Offset>(indices.size());
    }
  } else {
    const auto lengths =
        lognormal_row_lengths(rows, cols, total, profile.cov_target, rng.bits());
    std::vector<std::int32_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto len = static_cast<std::size_t>(lengths[r]);
      // Partial Fisher-Yates over a persistent permutation.
      for (std::size_t k = 0; k < len; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.below(cols - k));
        std::swap(perm[k], perm[j]);
      }
      const auto start = indices.size();
      indices.insert(indices.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(len));
      std::sort(indices.begin() + static_cast<std::ptrdiff_t>(start), indices.end());
      offsets[r + 1] = static_cast<Offset>(indices.size());
    }
  }

  AlignedVector<float> values(indices.size());
  for (auto& v : values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return CsrMatrix<float>(rows, cols, std::move(offsets), std::move(indices), std::move(values));
}

}  // namespace tilesparse

#endif  // TILESPARSE_RANDOM_HPP_
