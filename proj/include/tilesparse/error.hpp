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

#ifndef TILESPARSE_ERROR_HPP_
#define TILESPARSE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tilesparse {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A TileConfig violates its invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A value does not fit the selected index type.
class IndexOverflowError : public Error {
 public:
  using Error::Error;
};

/// A transpose plan was applied to a matrix with a different topology.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 means the error is not tied
/// to a particular line (e.g. a missing file or sidecar size mismatch).
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(format(path, line, what)), path_(std::move(path)), line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line,
                            const std::string& what) {
    if (line == 0) return path + ": " + what;
    return path + ":" + std::to_string(line) + ": " + what;
  }

  std::string path_;
  std::size_t line_;
};

/// The file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tilesparse

#endif  // TILESPARSE_ERROR_HPP_
