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

#ifndef TILESPARSE_IO_HPP_
#define TILESPARSE_IO_HPP_

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tilesparse/csr_matrix.hpp"
#include "tilesparse/error.hpp"

namespace tilesparse {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Splits on any of `seps`, dropping empty fields.
inline std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto j = s.find_first_of(seps, i);
    const auto end = j == std::string_view::npos ? s.size() : j;
    if (end > i) out.push_back(s.substr(i, end - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  // std::from_chars for double is not available on every supported toolchain.
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return lines;
}

/// Sorts each row's (column, value) pairs by column. Returns the position of
/// the first duplicated column, if any.
inline std::optional<std::size_t> sort_rows(const AlignedVector<Offset>& offsets,
                                            AlignedVector<std::int32_t>& indices,
                                            AlignedVector<float>& values) {
  std::vector<std::size_t> order;
  AlignedVector<std::int32_t> idx_tmp;
  AlignedVector<float> val_tmp;
  for (std::size_t r = 0; r + 1 < offsets.size(); ++r) {
    const auto b = static_cast<std::size_t>(offsets[r]);
    const auto e = static_cast<std::size_t>(offsets[r + 1]);
    if (!std::is_sorted(indices.begin() + b, indices.begin() + e)) {
      order.resize(e - b);
      std::iota(order.begin(), order.end(), b);
      std::stable_sort(order.begin(), order.end(),
                       [&](auto x, auto y) { return indices[x] < indices[y]; });
      idx_tmp.resize(e - b);
      val_tmp.resize(e - b);
      for (std::size_t k = 0; k < order.size(); ++k) {
        idx_tmp[k] = indices[order[k]];
        val_tmp[k] = values[order[k]];
      }
      std::copy(idx_tmp.begin(), idx_tmp.end(), indices.begin() + b);
      std::copy(val_tmp.begin(), val_tmp.end(), values.begin() + b);
    }
    for (std::size_t j = b + 1; j < e; ++j) {
      if (indices[j] == indices[j - 1]) return j;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SMTX
// ---------------------------------------------------------------------------
//
//   line 1: "<rows>, <cols>, <nnz>"
//   line 2: rows+1 space-separated row offsets
//   line 3: nnz space-separated column indices
//
// Values live in an optional sidecar of nnz little-endian f32 values.

/// `foo.smtx` -> `foo.vals`.
inline std::filesystem::path sidecar_path(const std::filesystem::path& smtx) {
  auto p = smtx;
  p.replace_extension(".vals");
  return p;
}

inline AlignedVector<float> read_values_file(const std::filesystem::path& path,
                                             std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() != expected * 4) {
    throw ParseError(path.string(), 0,
                     "values file holds " + std::to_string(bytes.size()) + " bytes, expected " +
                         std::to_string(expected * 4) + " (" + std::to_string(expected) +
                         " f32 values)");
  }
  AlignedVector<float> values(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    const std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                            static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8 |
                            static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16 |
                            static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24;
    values[i] = std::bit_cast<float>(u);
  }
  return values;
}

inline void write_values_file(const std::filesystem::path& path, std::span<const float> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (float v : values) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    const char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                       static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    out.write(b, 4);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

/// Loads an SMTX file. Values are read from `values_path` when given,
/// otherwise every stored value is 1.0.
inline CsrMatrix<float> load_smtx(const std::filesystem::path& path,
                                  const std::optional<std::filesystem::path>& values_path = {}) {
  const std::string name = path.string();
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw ParseError(name, 1, "empty file, expected \"<rows>, <cols>, <nnz>\"");

  const auto header = detail::split(lines[0], ",");
  if (header.size() != 3) {
    throw ParseError(name, 1, "expected \"<rows>, <cols>, <nnz>\"");
  }
  const auto rows = detail::parse_int<std::int64_t>(header[0]);
  const auto cols = detail::parse_int<std::int64_t>(header[1]);
  const auto nnz = detail::parse_int<std::int64_t>(header[2]);
  if (!rows || !cols || !nnz || *rows < 0 || *cols < 0 || *nnz < 0) {
    throw ParseError(name, 1, "header fields must be non-negative integers");
  }
  if (*nnz > std::numeric_limits<Offset>::max() ||
      *cols > std::numeric_limits<std::int32_t>::max()) {
    throw ParseError(name, 1, "matrix too large for 32-bit offsets/indices");
  }
  if (*rows > 0 && *nnz > *rows * *cols) {
    throw ParseError(name, 1, "nnz exceeds rows*cols");
  }

  if (lines.size() < 2) throw ParseError(name, 2, "missing row offsets line");
  const auto off_tok = detail::split(lines[1], " \t\r");
  if (off_tok.size() != static_cast<std::size_t>(*rows + 1)) {
    throw ParseError(name, 2,
                     "expected " + std::to_string(*rows + 1) + " row offsets, found " +
                         std::to_string(off_tok.size()));
  }
  AlignedVector<Offset> offsets(off_tok.size());
  for (std::size_t i = 0; i < off_tok.size(); ++i) {
    const auto v = detail::parse_int<Offset>(off_tok[i]);
    if (!v) throw ParseError(name, 2, "row offset " + std::to_string(i) + " is not an integer");
    offsets[i] = *v;
    if (i == 0 && *v != 0) throw ParseError(name, 2, "first row offset must be 0");
    if (i > 0 && *v < offsets[i - 1]) {
      throw ParseError(name, 2, "row offsets decrease at row " + std::to_string(i - 1));
    }
  }
  if (offsets.back() != *nnz) {
    throw ParseError(name, 2,
                     "last row offset " + std::to_string(offsets.back()) + " != nnz " +
                         std::to_string(*nnz));
  }

  std::vector<std::string_view> idx_tok;
  if (lines.size() >= 3) idx_tok = detail::split(lines[2], " \t\r");
  if (idx_tok.size() != static_cast<std::size_t>(*nnz)) {
    throw ParseError(name, 3,
                     "expected " + std::to_string(*nnz) + " column indices, found " +
                         std::to_string(idx_tok.size()));
  }
  for (std::size_t l = 3; l < lines.size(); ++l) {
    if (!detail::trim(lines[l]).empty()) {
      throw ParseError(name, l + 1, "unexpected content after column indices");
    }
  }
  AlignedVector<std::int32_t> indices(idx_tok.size());
  for (std::size_t i = 0; i < idx_tok.size(); ++i) {
    const auto v = detail::parse_int<std::int32_t>(idx_tok[i]);
    if (!v) throw ParseError(name, 3, "column index " + std::to_string(i) + " is not an integer");
    if (*v < 0 || *v >= *cols) {
      throw ParseError(name, 3,
                       "column index " + std::to_string(*v) + " at position " +
                           std::to_string(i) + " out of range [0, " + std::to_string(*cols) +
                           ")");
    }
    indices[i] = *v;
  }

  AlignedVector<float> values =
      values_path ? read_values_file(*values_path, indices.size())
                  : AlignedVector<float>(indices.size(), 1.0f);
  if (auto dup = detail::sort_rows(offsets, indices, values)) {
    throw ParseError(name, 3, "duplicate column index at position " + std::to_string(*dup));
  }
  return CsrMatrix<float>(static_cast<std::size_t>(*rows), static_cast<std::size_t>(*cols),
                          std::move(offsets), std::move(indices), std::move(values));
}

/// Writes the structure to `path`; when `write_values` is set the values go
/// to sidecar_path(path).
template <class T, class I>
void save_smtx(const CsrMatrix<T, I>& m, const std::filesystem::path& path,
               bool write_values = false) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.rows() << ", " << m.cols() << ", " << m.nnz() << "\n";
  const auto offsets = m.row_offsets();
  for (std::size_t i = 0; i < offsets.size(); ++i) out << (i ? " " : "") << offsets[i];
  out << "\n";
  const auto idx = m.col_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out << (i ? " " : "") << static_cast<std::int64_t>(idx[i]);
  }
  out << "\n";
  if (!out) throw IoError("failed writing " + path.string());
  if (write_values) {
    std::vector<float> v(m.nnz());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = to_float(m.values()[i]);
    write_values_file(sidecar_path(path), v);
  }
}

// ---------------------------------------------------------------------------
// MatrixMarket (coordinate real/integer/pattern general)
// ---------------------------------------------------------------------------

inline CsrMatrix<float> load_matrix_market(const std::filesystem::path& path) {
  const std::string name = path.string();
  const auto lines = detail::read_lines(path);
  if (lines.empty()) throw ParseError(name, 1, "empty file");

  const auto banner = detail::split(lines[0], " \t\r");
  auto lower = [](std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return r;
  };
  if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix") {
    throw ParseError(name, 1, "missing \"%%MatrixMarket matrix ...\" banner");
  }
  const std::string format = lower(banner[2]);
  const std::string field = lower(banner[3]);
  const std::string symmetry = lower(banner[4]);
  if (format != "coordinate") {
    throw ParseError(name, 1, "unsupported format \"" + format + "\" (only coordinate)");
  }
  if (field != "real" && field != "integer" && field != "pattern") {
    throw ParseError(name, 1, "unsupported field \"" + field + "\"");
  }
  if (symmetry != "general") {
    throw ParseError(name, 1, "unsupported symmetry \"" + symmetry + "\" (only general)");
  }
  const bool pattern = field == "pattern";

  std::size_t l = 1;
  auto skip_comments = [&] {
    while (l < lines.size()) {
      const auto t = detail::trim(lines[l]);
      if (!t.empty() && t[0] != '%') break;
      ++l;
    }
  };
  skip_comments();
  if (l >= lines.size()) throw ParseError(name, l + 1, "missing size line");
  const auto size_tok = detail::split(lines[l], " \t\r");
  std::optional<std::int64_t> rows, cols, nnz;
  if (size_tok.size() == 3) {
    rows = detail::parse_int<std::int64_t>(size_tok[0]);
    cols = detail::parse_int<std::int64_t>(size_tok[1]);
    nnz = detail::parse_int<std::int64_t>(size_tok[2]);
  }
  if (!rows || !cols || !nnz || *rows < 0 || *cols < 0 || *nnz < 0) {
    throw ParseError(name, l + 1, "expected \"<rows> <cols> <entries>\"");
  }
  if (*nnz > std::numeric_limits<Offset>::max() ||
      *cols > std::numeric_limits<std::int32_t>::max()) {
    throw ParseError(name, l + 1, "matrix too large for 32-bit offsets/indices");
  }
  ++l;

  struct Entry {
    std::int64_t row, col;
    float value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(*nnz));
  for (; l < lines.size(); ++l) {
    const auto t = detail::trim(lines[l]);
    if (t.empty() || t[0] == '%') continue;
    if (entries.size() == static_cast<std::size_t>(*nnz)) {
      throw ParseError(name, l + 1, "more entries than the declared " + std::to_string(*nnz));
    }
    const auto tok = detail::split(t, " \t");
    if (tok.size() != (pattern ? 2u : 3u)) {
      throw ParseError(name, l + 1,
                       pattern ? "expected \"<row> <col>\"" : "expected \"<row> <col> <value>\"");
    }
    const auto r = detail::parse_int<std::int64_t>(tok[0]);
    const auto c = detail::parse_int<std::int64_t>(tok[1]);
    if (!r || !c) throw ParseError(name, l + 1, "coordinates must be integers");
    if (*r < 1 || *r > *rows || *c < 1 || *c > *cols) {
      throw ParseError(name, l + 1,
                       "coordinate (" + std::to_string(*r) + ", " + std::to_string(*c) +
                           ") outside " + std::to_string(*rows) + "x" + std::to_string(*cols));
    }
    float v = 1.0f;
    if (!pattern) {
      const auto d = detail::parse_double(tok[2]);
      if (!d) throw ParseError(name, l + 1, "value is not a number");
      v = static_cast<float>(*d);
    }
    entries.push_back({*r - 1, *c - 1, v, l + 1});
  }
  if (entries.size() != static_cast<std::size_t>(*nnz)) {
    throw ParseError(name, lines.size() + 1,
                     "expected " + std::to_string(*nnz) + " entries, found " +
                         std::to_string(entries.size()));
  }

  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col) {
      const auto first = std::min(entries[i].line, entries[i - 1].line);
      const auto second = std::max(entries[i].line, entries[i - 1].line);
      throw ParseError(name, second,
                       "duplicate entry (" + std::to_string(entries[i].row + 1) + ", " +
                           std::to_string(entries[i].col + 1) + "), first seen on line " +
                           std::to_string(first));
    }
  }

  AlignedVector<Offset> offsets(static_cast<std::size_t>(*rows) + 1, 0);
  AlignedVector<std::int32_t> indices(entries.size());
  AlignedVector<float> values(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ++offsets[static_cast<std::size_t>(entries[i].row) + 1];
    indices[i] = static_cast<std::int32_t>(entries[i].col);
    values[i] = entries[i].value;
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(*rows); ++r) offsets[r + 1] += offsets[r];
  return CsrMatrix<float>(static_cast<std::size_t>(*rows), static_cast<std::size_t>(*cols),
                          std::move(offsets), std::move(indices), std::move(values));
}

template <class T, class I>
void save_matrix_market(const CsrMatrix<T, I>& m, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot write " + path.string());
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%zu %zu %zu\n", m.rows(), m.cols(), m.nnz());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (Offset j = m.row_begin(r); j < m.row_end(r); ++j) {
      // %.9g round-trips every float exactly.
      std::fprintf(f, "%zu %lld %.9g\n", r + 1,
                   static_cast<long long>(m.col_indices()[j]) + 1,
                   static_cast<double>(to_float(m.values()[j])));
    }
  }
  const bool ok = std::fclose(f) == 0;
  if (!ok) throw IoError("failed writing " + path.string());
}

/// Dispatches on extension: `.mtx` is MatrixMarket, anything else SMTX
/// (picking up a `.vals` sidecar when one exists).
inline CsrMatrix<float> load_matrix(const std::filesystem::path& path) {
  if (path.extension() == ".mtx") return load_matrix_market(path);
  const auto vals = sidecar_path(path);
  if (vals != path && std::filesystem::exists(vals)) return load_smtx(path, vals);
  return load_smtx(path);
}

}  // namespace tilesparse

#endif  // TILESPARSE_IO_HPP_
