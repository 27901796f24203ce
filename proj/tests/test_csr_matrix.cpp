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
#include <vector>

#include "helpers.hpp"
#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/random.hpp"
#include "tilesparse/stats.hpp"

namespace {

using namespace tilesparse;
using helpers::csr;
using Kind = Violation::Kind;

TEST(Validate, MinimalMatrixIsValid) {
  const auto m = csr(2, 2, {0, 1, 2}, {0, 1}, {1, 1});
  EXPECT_TRUE(validate(m).ok()) << validate(m).to_string();
}

TEST(Validate, DecreasingOffsetsReportedAtRow) {
  const auto m = csr(2, 2, {0, 2, 1}, {0, 1}, {1, 1});
  const auto rep = validate(m);
  ASSERT_TRUE(rep.has(Kind::kDecreasingOffsets));
  for (const auto& v : rep.violations) {
    if (v.kind == Kind::kDecreasingOffsets) {
      EXPECT_EQ(v.row, 1);
      EXPECT_NE(v.message.find("non-decreasing offsets"), std::string::npos);
    }
  }
}

TEST(Validate, IndexOutOfRange) {
  const auto m = csr(2, 2, {0, 1, 2}, {0, 2}, {1, 1});
  const auto rep = validate(m);
  ASSERT_TRUE(rep.has(Kind::kIndexOutOfRange));
  EXPECT_NE(rep.to_string().find("index out of range"), std::string::npos);
}

TEST(Validate, ReportsEveryViolation) {
  const auto m = csr(2, 3, {1, 2, 3}, {2, 1, 5}, {1, 1});
  const auto rep = validate(m);
  EXPECT_TRUE(rep.has(Kind::kFirstOffset));
  EXPECT_TRUE(rep.has(Kind::kValuesLength));
  EXPECT_TRUE(rep.has(Kind::kIndexOutOfRange));
  EXPECT_TRUE(rep.has(Kind::kNotAscending) || rep.has(Kind::kIndexOutOfRange));
  EXPECT_THROW(require_valid(m), InvalidMatrixError);
}

TEST(Validate, DuplicatesAndDescendingRejected) {
  EXPECT_TRUE(validate(csr(1, 4, {0, 2}, {1, 1}, {1, 1})).has(Kind::kNotAscending));
  EXPECT_TRUE(validate(csr(1, 4, {0, 2}, {3, 1}, {1, 1})).has(Kind::kNotAscending));
  EXPECT_TRUE(validate(csr(2, 4, {0, 1}, {0}, {1})).has(Kind::kOffsetsLength));
  EXPECT_TRUE(validate(csr(1, 4, {0, 3}, {0, 1}, {1, 1})).has(Kind::kLastOffset));
}

TEST(Validate, SixteenBitWidthLimits) {
  const auto ok = csr<float, std::uint16_t>(1, 65535, {0, 1}, {65534}, {1});
  EXPECT_TRUE(validate(ok).ok());
  const auto wide = csr<float, std::uint16_t>(1, 70000, {0, 1}, {5}, {1});
  EXPECT_TRUE(validate(wide).has(Kind::kIndexWidth));
}

TEST(Validate, EveryGeneratedMatrixIsValid) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto u = random_csr(1 + seed * 3, 1 + seed * 5, 0.1 * static_cast<double>(seed % 10),
                              seed, RowProfile::uniform());
    EXPECT_TRUE(validate(u).ok()) << validate(u).to_string();
    const auto l = random_csr(40, 60, 0.8, seed, RowProfile::lognormal(0.1 * static_cast<double>(seed)));
    EXPECT_TRUE(validate(l).ok()) << validate(l).to_string();
  }
}

TEST(Dense, ShapeChecked) {
  EXPECT_THROW(DenseMatrix<float>(2, 2, AlignedVector<float>(3)), ShapeError);
  const DenseMatrix<float> d(3, 4);
  EXPECT_EQ(d.size(), 12u);
  EXPECT_EQ(reinterpret_cast<std::uintptr_t>(d.data()) % kBufferAlignment, 0u);
}

TEST(Conversion, FromDenseDiagonal) {
  const auto m = csr_from_dense(helpers::dense({{1, 0}, {0, 2}}));
  EXPECT_EQ(std::vector<Offset>(m.row_offsets().begin(), m.row_offsets().end()),
            (std::vector<Offset>{0, 1, 2}));
  EXPECT_EQ(std::vector<int>(m.col_indices().begin(), m.col_indices().end()),
            (std::vector<int>{0, 1}));
  EXPECT_EQ(std::vector<float>(m.values().begin(), m.values().end()),
            (std::vector<float>{1, 2}));
}

TEST(Conversion, AllZero) {
  const auto m = csr_from_dense(DenseMatrix<float>(3, 3));
  EXPECT_EQ(m.nnz(), 0u);
  EXPECT_EQ(std::vector<Offset>(m.row_offsets().begin(), m.row_offsets().end()),
            (std::vector<Offset>{0, 0, 0, 0}));
}

TEST(Conversion, Threshold) {
  const auto m = csr_from_dense(helpers::dense({{0.1f, 0}, {0, 0.3f}}), 0.2);
  ASSERT_EQ(m.nnz(), 1u);
  EXPECT_EQ(m.row_length(1), 1u);
  EXPECT_EQ(m.col_indices()[0], 1);
  EXPECT_EQ(m.values()[0], 0.3f);
}

TEST(Conversion, ToDense) {
  const auto empty = csr_to_dense(CsrMatrix<float>::zeros(2, 2));
  EXPECT_EQ(empty, DenseMatrix<float>(2, 2));
  const auto d = csr_to_dense(csr(2, 2, {0, 1, 2}, {0, 1}, {5, 7}));
  EXPECT_EQ(d, helpers::dense({{5, 0}, {0, 7}}));
}

TEST(Conversion, RoundTripRandomDense) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t r = 1 + seed % 64, c = 1 + (seed * 7) % 64;
    auto d = random_dense<float>(r, c, seed);
    // Punch exact zeros so the sparse form is nontrivial.
    for (std::size_t i = 0; i < d.size(); i += 3) d.data()[i] = 0.0f;
    const auto m = csr_from_dense(d);
    EXPECT_TRUE(validate(m).ok());
    EXPECT_EQ(csr_to_dense(m), d);
  }
}

TEST(Conversion, SixteenBitNarrowing) {
  const auto m = random_csr(8, 100, 0.5, 3, RowProfile::uniform());
  const auto h = convert_csr<half, std::uint16_t>(m);
  EXPECT_EQ(h.nnz(), m.nnz());
  for (std::size_t j = 0; j < m.nnz(); ++j) {
    EXPECT_EQ(h.col_indices()[j], m.col_indices()[j]);
    EXPECT_EQ(h.values()[j].bits(), half(m.values()[j]).bits());
  }
  const auto wide = CsrMatrix<float>::zeros(2, 65536);
  EXPECT_THROW((convert_csr<half, std::uint16_t>(wide)), IndexOverflowError);
  EXPECT_NO_THROW((convert_csr<half, std::uint16_t>(CsrMatrix<float>::zeros(2, 65535))));
}

TEST(Conversion, WithValuesKeepsStructure) {
  const auto m = csr(2, 3, {0, 2, 3}, {0, 2, 1}, {1, 2, 3});
  const auto w = m.with_values(AlignedVector<float>{4, 5, 6});
  EXPECT_TRUE(w.same_structure(m));
  EXPECT_EQ(w.values()[2], 6.0f);
  EXPECT_THROW(m.with_values(AlignedVector<float>{1}), ShapeError);
}

TEST(Stats, Sparsity) {
  const auto s = compute_stats(csr(2, 2, {0, 1, 1}, {0}, {1}));
  EXPECT_DOUBLE_EQ(s.sparsity, 0.75);
  EXPECT_DOUBLE_EQ(s.avg_row_length, 0.5);
}

TEST(Stats, EqualRowsHaveZeroCov) {
  const auto s = compute_stats(helpers::with_row_lengths({2, 2, 2}, 5));
  ASSERT_TRUE(s.row_cov.has_value());
  EXPECT_EQ(*s.row_cov, 0.0);
}

TEST(Stats, HandComputedCov) {
  const auto s = compute_stats(helpers::with_row_lengths({1, 3}, 5));
  ASSERT_TRUE(s.row_cov.has_value());
  EXPECT_DOUBLE_EQ(*s.row_cov, 0.5);
  EXPECT_EQ(s.min_row_length, 1u);
  EXPECT_EQ(s.max_row_length, 3u);
}

TEST(Stats, EmptyMatrixHasNoCov) {
  const auto s = compute_stats(CsrMatrix<float>::zeros(4, 4));
  EXPECT_FALSE(s.row_cov.has_value());
  EXPECT_DOUBLE_EQ(s.sparsity, 1.0);
}

TEST(Stats, DiagonalMatrix) {
  std::vector<int> ones(10, 1);
  const auto m = csr(10, 10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                     std::vector<float>(10, 1.0f));
  const auto s = compute_stats(m);
  EXPECT_DOUBLE_EQ(s.sparsity, 1.0 - 1.0 / 10.0);
  EXPECT_EQ(*s.row_cov, 0.0);
}

TEST(Stats, SparsityComplementsDensity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_csr(37, 53, 0.05 * static_cast<double>(seed), seed, RowProfile::uniform());
    const auto s = compute_stats(m);
    EXPECT_NEAR(s.sparsity + static_cast<double>(s.nnz) / (37.0 * 53.0), 1.0, 1e-15);
    // CoV is zero exactly when all rows have equal length.
    EXPECT_EQ(s.row_cov.value_or(-1.0) == 0.0, s.min_row_length == s.max_row_length && s.nnz > 0);
  }
}

}  // namespace
