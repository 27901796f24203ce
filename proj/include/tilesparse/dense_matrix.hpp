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

#ifndef TILESPARSE_DENSE_MATRIX_HPP_
#define TILESPARSE_DENSE_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <string>

#include "tilesparse/aligned.hpp"
#include "tilesparse/error.hpp"
#include "tilesparse/half.hpp"

namespace tilesparse {

/// Row-major dense matrix of float or half elements.
template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0.0f)) {}
  DenseMatrix(std::size_t rows, std::size_t cols, AlignedVector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("dense matrix data length " + std::to_string(data_.size()) +
                       " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }

  static constexpr Precision precision() noexcept { return precision_of<T>; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<const T> values() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  AlignedVector<T> data_;
};

/// Element-wise conversion between precisions (float -> half rounds to
/// nearest even).
template <class To, class From>
DenseMatrix<To> convert_dense(const DenseMatrix<From>& m) {
  AlignedVector<To> data(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    data[i] = from_float<To>(to_float(m.data()[i]));
  }
  return DenseMatrix<To>(m.rows(), m.cols(), std::move(data));
}

}  // namespace tilesparse

#endif  // TILESPARSE_DENSE_MATRIX_HPP_
