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

#ifndef TILESPARSE_CSR_MATRIX_HPP_
#define TILESPARSE_CSR_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "tilesparse/aligned.hpp"
#include "tilesparse/dense_matrix.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/half.hpp"
#include "tilesparse/row_swizzle.hpp"

namespace tilesparse {

using Offset = std::int32_t;

enum class IndexWidth { k32, k16 };

template <class I>
inline constexpr IndexWidth index_width_of =
    sizeof(I) == 2 ? IndexWidth::k16 : IndexWidth::k32;

/// Compressed sparse row matrix.
///
/// `T` is float or half; `I` is the column index type (std::int32_t, or
/// std::uint16_t for the mixed-precision path). Column indices are strictly
/// ascending inside each row. Explicitly stored zeros are kept and count as
/// nonzeros. The optional `swizzle` is processing-order metadata only; the
/// stored arrays are always in natural row order.
template <class T = float, class I = std::int32_t>
class CsrMatrix {
  static_assert(std::is_integral_v<I>);

 public:
  using value_type = T;
  using index_type = I;

  CsrMatrix() : row_offsets_(1, 0) {}

  /// Takes ownership of the arrays without checking them; see validate().
  CsrMatrix(std::size_t rows, std::size_t cols, AlignedVector<Offset> row_offsets,
            AlignedVector<I> col_indices, AlignedVector<T> values)
      : rows_(rows),
        cols_(cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {}

  /// Empty (all-zero) matrix of the given shape.
  static CsrMatrix zeros(std::size_t rows, std::size_t cols) {
    return CsrMatrix(rows, cols, AlignedVector<Offset>(rows + 1, 0), {}, {});
  }

  static constexpr IndexWidth index_width() noexcept { return index_width_of<I>; }
  static constexpr Precision precision() noexcept { return precision_of<T>; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_indices_.size(); }

  Offset row_begin(std::size_t r) const noexcept { return row_offsets_[r]; }
  Offset row_end(std::size_t r) const noexcept { return row_offsets_[r + 1]; }
  std::size_t row_length(std::size_t r) const noexcept {
    return static_cast<std::size_t>(row_offsets_[r + 1] - row_offsets_[r]);
  }

  std::span<const Offset> row_offsets() const noexcept { return row_offsets_; }
  std::span<const I> col_indices() const noexcept { return col_indices_; }
  std::span<const T> values() const noexcept { return values_; }
  std::span<T> mutable_values() noexcept { return values_; }

  const std::optional<RowSwizzle>& swizzle() const noexcept { return swizzle_; }
  void set_swizzle(std::optional<RowSwizzle> s) { swizzle_ = std::move(s); }

  /// Same topology, new values.
  CsrMatrix with_values(AlignedVector<T> values) const {
    if (values.size() != nnz()) {
      throw ShapeError("with_values: expected " + std::to_string(nnz()) +
                       " values, got " + std::to_string(values.size()));
    }
    CsrMatrix out(rows_, cols_, row_offsets_, col_indices_, std::move(values));
    out.swizzle_ = swizzle_;
    return out;
  }

  friend bool operator==(const CsrMatrix& a, const CsrMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_offsets_ == b.row_offsets_ &&
           a.col_indices_ == b.col_indices_ && a.values_ == b.values_;
  }

  /// True when both matrices have identical shape and structure arrays.
  bool same_structure(const CsrMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && row_offsets_ == o.row_offsets_ &&
           col_indices_ == o.col_indices_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  AlignedVector<Offset> row_offsets_;
  AlignedVector<I> col_indices_;
  AlignedVector<T> values_;
  std::optional<RowSwizzle> swizzle_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind {
    kOffsetsLength,
    kFirstOffset,
    kDecreasingOffsets,
    kLastOffset,
    kValuesLength,
    kIndexOutOfRange,
    kNotAscending,
    kIndexWidth,
  };

  Kind kind;
  std::int64_t row = -1;       // -1 when not tied to a row
  std::int64_t position = -1;  // nonzero position, -1 when not applicable
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(Violation::Kind k) const {
    for (const auto& v : violations)
      if (v.kind == k) return true;
    return false;
  }
  std::string to_string() const {
    std::string s;
    for (const auto& v : violations) {
      if (!s.empty()) s += "; ";
      s += v.message;
    }
    return s.empty() ? "ok" : s;
  }
};

/// Reports every violated CSR invariant; never throws.
template <class T, class I>
ValidationReport validate(const CsrMatrix<T, I>& m) {
  using K = Violation::Kind;
  ValidationReport report;
  auto add = [&](K kind, std::int64_t row, std::int64_t pos, std::string msg) {
    report.violations.push_back({kind, row, pos, std::move(msg)});
  };

  const auto offsets = m.row_offsets();
  const auto indices = m.col_indices();
  const std::int64_t nnz = static_cast<std::int64_t>(indices.size());

  if (m.values().size() != indices.size()) {
    add(K::kValuesLength, -1, -1,
        "values length " + std::to_string(m.values().size()) +
            " != column index length " + std::to_string(indices.size()));
  }
  if (offsets.size() != m.rows() + 1) {
    add(K::kOffsetsLength, -1, -1,
        "row offsets length " + std::to_string(offsets.size()) + " != rows+1 (" +
            std::to_string(m.rows() + 1) + ")");
    return report;
  }
  if (offsets[0] != 0) {
    add(K::kFirstOffset, 0, -1, "row_offsets[0] is " + std::to_string(offsets[0]) + ", not 0");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (offsets[r + 1] < offsets[r]) {
      add(K::kDecreasingOffsets, static_cast<std::int64_t>(r), -1,
          "non-decreasing offsets violated at row " + std::to_string(r));
    }
  }
  if (offsets[m.rows()] != nnz) {
    add(K::kLastOffset, static_cast<std::int64_t>(m.rows()), -1,
        "row_offsets[rows] is " + std::to_string(offsets[m.rows()]) + ", nnz is " +
            std::to_string(nnz));
  }

  if constexpr (index_width_of<I> == IndexWidth::k16) {
    if (m.cols() > 65535) {
      add(K::kIndexWidth, -1, -1,
          "16-bit indices require cols <= 65535, got " + std::to_string(m.cols()));
    }
  }

  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::int64_t b = offsets[r];
    const std::int64_t e = offsets[r + 1];
    if (b < 0 || e < b || e > nnz) continue;  // already reported via offsets
    if constexpr (index_width_of<I> == IndexWidth::k16) {
      if (e - b > 65535) {
        add(K::kIndexWidth, static_cast<std::int64_t>(r), b,
            "row " + std::to_string(r) + " has more than 65535 nonzeros");
      }
    }
    for (std::int64_t j = b; j < e; ++j) {
      const std::int64_t c = static_cast<std::int64_t>(indices[j]);
      if (c < 0 || c >= static_cast<std::int64_t>(m.cols())) {
        add(K::kIndexOutOfRange, static_cast<std::int64_t>(r), j,
            "index out of range: column " + std::to_string(c) + " at position " +
                std::to_string(j) + " (row " + std::to_string(r) + ")");
      }
      if (j > b && static_cast<std::int64_t>(indices[j - 1]) >= c) {
        add(K::kNotAscending, static_cast<std::int64_t>(r), j,
            "column indices not strictly ascending at position " + std::to_string(j) +
                " (row " + std::to_string(r) + ")");
      }
    }
  }
  return report;
}

class InvalidMatrixError : public Error {
 public:
  explicit InvalidMatrixError(const ValidationReport& r)
      : Error("invalid CSR matrix: " + r.to_string()) {}
};

template <class T, class I>
void require_valid(const CsrMatrix<T, I>& m) {
  auto report = validate(m);
  if (!report.ok()) throw InvalidMatrixError(report);
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

/// Drops entries with |v| <= zero_threshold.
template <class T>
CsrMatrix<T> csr_from_dense(const DenseMatrix<T>& d, double zero_threshold = 0.0) {
  if (!(zero_threshold >= 0.0)) throw Error("csr_from_dense: zero_threshold must be >= 0");
  AlignedVector<Offset> offsets(d.rows() + 1, 0);
  AlignedVector<std::int32_t> indices;
  AlignedVector<T> values;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      const T v = d(r, c);
      if (std::fabs(static_cast<double>(to_float(v))) <= zero_threshold) continue;
      indices.push_back(static_cast<std::int32_t>(c));
      values.push_back(v);
    }
    offsets[r + 1] = static_cast<Offset>(indices.size());
  }
  return CsrMatrix<T>(d.rows(), d.cols(), std::move(offsets), std::move(indices),
                      std::move(values));
}

template <class T, class I>
DenseMatrix<T> csr_to_dense(const CsrMatrix<T, I>& m) {
  DenseMatrix<T> d(m.rows(), m.cols());
  const auto idx = m.col_indices();
  const auto val = m.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (Offset j = m.row_begin(r); j < m.row_end(r); ++j) {
      d(r, static_cast<std::size_t>(idx[j])) = val[j];
    }
  }
  return d;
}

/// Re-types values and/or column indices. Narrowing to 16-bit indices throws
/// IndexOverflowError when cols > 65535.
template <class T2, class I2, class T, class I>
CsrMatrix<T2, I2> convert_csr(const CsrMatrix<T, I>& m) {
  if (m.cols() > 0 &&
      m.cols() - 1 > static_cast<std::size_t>(std::numeric_limits<I2>::max())) {
    throw IndexOverflowError("matrix has " + std::to_string(m.cols()) +
                             " columns, too many for " + std::to_string(8 * sizeof(I2)) +
                             "-bit column indices");
  }
  if constexpr (index_width_of<I2> == IndexWidth::k16) {
    if (m.cols() > 65535) {
      throw IndexOverflowError("16-bit index path requires cols <= 65535, got " +
                               std::to_string(m.cols()));
    }
  }
  AlignedVector<Offset> offsets(m.row_offsets().begin(), m.row_offsets().end());
  AlignedVector<I2> indices(m.nnz());
  AlignedVector<T2> values(m.nnz());
  for (std::size_t j = 0; j < m.nnz(); ++j) {
    indices[j] = static_cast<I2>(m.col_indices()[j]);
    values[j] = from_float<T2>(to_float(m.values()[j]));
  }
  CsrMatrix<T2, I2> out(m.rows(), m.cols(), std::move(offsets), std::move(indices),
                        std::move(values));
  out.set_swizzle(m.swizzle());
  return out;
}

}  // namespace tilesparse

#endif  // TILESPARSE_CSR_MATRIX_HPP_
