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

#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tilesparse/load_balance.hpp"
#include "tilesparse/random.hpp"
#include "tilesparse/sddmm.hpp"
#include "tilesparse/transpose.hpp"

namespace {

using namespace tilesparse;

constexpr double kTolerance = 1e-5;

double rel_error(const DenseMatrix<float>& a, const DenseMatrix<float>& b,
                 const CsrMatrix<float>& out) {
  oracle::Dense64 mag(0, 0);
  const auto bt = oracle::transpose(oracle::to64(b));
  const auto want = oracle::matmul(oracle::to64(a), bt, &mag);
  return oracle::max_rel_error_sparse(out, want, mag);
}

TEST(Sddmm, IdentityDiagonal) {
  const auto i2 = helpers::dense({{1, 0}, {0, 1}});
  const auto diag = helpers::csr(2, 2, {0, 1, 2}, {0, 1}, {9, 9});
  const auto out = sddmm(SddmmProblem<float>{i2, i2, diag}, default_tile_config(2, KernelKind::kSddmm));
  EXPECT_EQ(std::vector<float>(out.values().begin(), out.values().end()), (std::vector<float>{1, 1}));
}

TEST(Sddmm, OrthogonalRowsGiveZero) {
  const auto i2 = helpers::dense({{1, 0}, {0, 1}});
  const auto off = helpers::csr(2, 2, {0, 1, 2}, {1, 0}, {1, 1});
  const auto out = sddmm(SddmmProblem<float>{i2, i2, off}, default_tile_config(2, KernelKind::kSddmm));
  EXPECT_EQ(std::vector<float>(out.values().begin(), out.values().end()), (std::vector<float>{0, 0}));
}

TEST(Sddmm, ReferenceSmallCases) {
  const auto a = helpers::dense({{2}});
  const auto b = helpers::dense({{3}});
  const auto p = helpers::csr(1, 1, {0, 1}, {0}, {1});
  EXPECT_EQ(sddmm_reference(SddmmProblem<float>{a, b, p}).values()[0], 6.0f);
  const auto empty = CsrMatrix<float>::zeros(1, 1);
  EXPECT_EQ(sddmm_reference(SddmmProblem<float>{a, b, empty}).nnz(), 0u);
}

TEST(Sddmm, RandomAgainstDenseOracle) {
  Rng rng(77);
  const std::size_t ks[] = {1, 4, 32, 33, 64};
  const double sparsities[] = {0.5, 0.7, 0.9, 0.98};
  for (int i = 0; i < 100; ++i) {
    const auto m = 1 + rng.below(65), n = 1 + rng.below(65);
    const auto k = ks[i % 5];
    const auto pattern = random_csr(m, n, sparsities[i % 4], 300 + i);
    const auto a = random_dense<float>(m, k, 1 + i);
    const auto b = random_dense<float>(n, k, 1000 + i);
    const SddmmProblem<float> prob{a, b, pattern};
    for (int vw : {1, 2, 4}) {
      const TileConfig cfg{4 * vw, 8 * vw, i % 2 ? 4 : 1, vw};
      const auto out = sddmm(prob, cfg);
      EXPECT_TRUE(out.same_structure(pattern));
      EXPECT_LE(rel_error(a, b, out), kTolerance) << m << " " << n << " " << k << " vw " << vw;
    }
    const auto ref = sddmm_reference(prob);
    EXPECT_LE(rel_error(a, b, ref), 6e-8);
  }
}

TEST(Sddmm, ScalarConfigBitExactWithSequentialF32) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pattern = random_csr(20, 30, 0.7, seed);
    const auto a = random_dense<float>(20, 33, seed);
    const auto b = random_dense<float>(30, 33, seed + 50);
    const SddmmProblem<float> prob{a, b, pattern};
    const auto out = sddmm(prob, TileConfig{4, 8, 1, 1});
    EXPECT_TRUE(oracle::bit_equal_values(out, sddmm_reference<float>(prob)));
  }
}

TEST(Sddmm, PatternValuesIgnored) {
  const auto pattern = random_csr(25, 25, 0.6, 4);
  AlignedVector<float> junk(pattern.nnz(), 123.0f);
  const auto other = pattern.with_values(junk);
  const auto a = random_dense<float>(25, 16, 1);
  const auto b = random_dense<float>(25, 16, 2);
  const auto cfg = default_tile_config(16, KernelKind::kSddmm);
  EXPECT_TRUE(oracle::bit_equal_values(sddmm(SddmmProblem<float>{a, b, pattern}, cfg),
                                       sddmm(SddmmProblem<float>{a, b, other}, cfg)));
}

TEST(Sddmm, ScaledValues) {
  const auto base = random_csr(30, 20, 0.5, 5);
  const auto a = random_dense<float>(30, 12, 6);
  const auto b = random_dense<float>(20, 12, 7);
  const auto cfg = default_tile_config(12, KernelKind::kSddmm);
  const auto plain = sddmm(SddmmProblem<float>{a, b, base}, cfg);

  SddmmOptions off;
  EXPECT_TRUE(oracle::bit_equal_values(plain, sddmm_general(SddmmProblem<float>{a, b, base}, cfg, off)));

  const auto twos = base.with_values(AlignedVector<float>(base.nnz(), 2.0f));
  SddmmOptions on;
  on.scale_values = true;
  const auto doubled = sddmm_general(SddmmProblem<float>{a, b, twos}, cfg, on);
  for (std::size_t j = 0; j < base.nnz(); ++j) EXPECT_EQ(doubled.values()[j], 2.0f * plain.values()[j]);

  const auto scaled = sddmm_general(SddmmProblem<float>{a, b, base}, cfg, on);
  const auto want = sddmm_reference(SddmmProblem<float>{a, b, base}, true);
  for (std::size_t j = 0; j < base.nnz(); ++j) {
    EXPECT_NEAR(scaled.values()[j], want.values()[j], 1e-5f);
  }
}

TEST(Sddmm, TransposeConsistency) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pattern = random_csr(17 + seed, 29, 0.7, seed);
    const auto a = random_dense<float>(pattern.rows(), 20, seed);
    const auto b = random_dense<float>(29, 20, seed + 9);
    const auto cfg = default_tile_config(20, KernelKind::kSddmm);
    const auto forward = sddmm(SddmmProblem<float>{a, b, pattern}, cfg);
    const auto pt = transpose(pattern);
    const auto backward = transpose(sddmm(SddmmProblem<float>{b, a, pt}, cfg));
    ASSERT_TRUE(backward.same_structure(forward));
    for (std::size_t j = 0; j < forward.nnz(); ++j) {
      EXPECT_NEAR(forward.values()[j], backward.values()[j], 1e-6);
    }
  }
}

TEST(Sddmm, SwizzleDoesNotChangeBits) {
  const auto pattern = random_csr(64, 64, 0.8, 3, RowProfile::lognormal(1.2));
  const auto a = random_dense<float>(64, 32, 1);
  const auto b = random_dense<float>(64, 32, 2);
  const auto cfg = default_tile_config(32, KernelKind::kSddmm);
  const auto swz = build_row_swizzle(pattern);
  SddmmOptions o;
  o.swizzle = &swz;
  EXPECT_TRUE(oracle::bit_equal_values(sddmm(SddmmProblem<float>{a, b, pattern}, cfg),
                                       sddmm(SddmmProblem<float>{a, b, pattern}, cfg, o)));
}

TEST(Sddmm, DeterministicAcrossThreadCounts) {
  const auto pattern = random_csr(200, 150, 0.9, 8);
  const auto a = random_dense<float>(200, 64, 1);
  const auto b = random_dense<float>(150, 64, 2);
  const auto cfg = default_tile_config(64, KernelKind::kSddmm);
  ThreadPool one(1);
  SddmmOptions o;
  o.pool = &one;
  const auto base = sddmm(SddmmProblem<float>{a, b, pattern}, cfg, o);
  for (std::size_t t : {2u, 8u}) {
    ThreadPool pool(t);
    o.pool = &pool;
    EXPECT_TRUE(oracle::bit_equal_values(base, sddmm(SddmmProblem<float>{a, b, pattern}, cfg, o)));
  }
}

TEST(Sddmm, HalfPrecisionPath) {
  const auto pattern = convert_csr<half, std::uint16_t>(random_csr(40, 50, 0.7, 1));
  const auto a = convert_dense<half>(random_dense<float>(40, 64, 2));
  const auto b = convert_dense<half>(random_dense<float>(50, 64, 3));
  const auto out = sddmm(SddmmProblem<half, std::uint16_t>{a, b, pattern},
                         default_tile_config(64, KernelKind::kSddmm));
  oracle::Dense64 mag(0, 0);
  const auto want = oracle::matmul(oracle::to64(a), oracle::transpose(oracle::to64(b)), &mag);
  EXPECT_LE(oracle::max_rel_error_sparse(out, want, mag), 1e-2);
}

TEST(Sddmm, ShapeErrors) {
  const auto p = random_csr(4, 5, 0.5, 1);
  const auto a = random_dense<float>(4, 3, 1);
  const auto bad_k = random_dense<float>(5, 2, 1);
  const auto bad_n = random_dense<float>(6, 3, 1);
  const auto cfg = default_tile_config(3, KernelKind::kSddmm);
  EXPECT_THROW(sddmm(SddmmProblem<float>{a, bad_k, p}, cfg), ShapeError);
  EXPECT_THROW(sddmm(SddmmProblem<float>{a, bad_n, p}, cfg), ShapeError);
  EXPECT_THROW(sddmm_reference(SddmmProblem<float>{a, bad_n, p}), ShapeError);
}

}  // namespace
