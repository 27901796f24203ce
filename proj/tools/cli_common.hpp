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

// Flag handling shared by the subcommands.

#ifndef TILESPARSE_TOOLS_CLI_COMMON_HPP_
#define TILESPARSE_TOOLS_CLI_COMMON_HPP_

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "harness.hpp"
#include "tilesparse/tilesparse.hpp"

namespace tilesparse::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Bad flag values detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Action = std::function<int()>;

/// Flags shared by every command that builds a problem.
struct ProblemOptions {
  std::string matrix;
  std::string gen;
  double sparsity = 0.9;
  std::optional<double> cov;
  std::size_t n = 128;
  std::string precision = "f32";
  std::uint64_t seed = 1;
};

struct KernelOptions {
  std::optional<int> tile_k, tile_x, tile_y, vector_width;
  bool no_load_balance = false;
  bool no_vector = false;
  bool no_residue_unroll = false;
  bool no_prescale = false;
};

struct OutputOptions {
  std::string output;
  std::string format = "csv";
  std::size_t threads = 0;
};

inline void add_problem_flags(CLI::App* app, ProblemOptions& o) {
  app->add_option("--matrix", o.matrix, "SMTX or MatrixMarket (.mtx) file");
  app->add_option("--gen", o.gen, "generate a random RxC matrix instead of loading one");
  app->add_option("--sparsity", o.sparsity, "fraction of zeros for --gen")->check(CLI::Range(0.0, 1.0));
  app->add_option("--cov", o.cov, "row-length coefficient of variation for --gen (lognormal rows)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--n", o.n, "dense dimension: output columns for spmm, inner dimension for sddmm")
      ->check(CLI::PositiveNumber);
  app->add_option("--precision", o.precision, "f32 or f16")->check(CLI::IsMember({"f32", "f16"}));
  app->add_option("--seed", o.seed, "seed for generated operands");
}

inline void add_kernel_flags(CLI::App* app, KernelOptions& o) {
  app->add_option("--tile-k", o.tile_k, "nonzeros staged per main-loop step");
  app->add_option("--tile-x", o.tile_x, "output columns (spmm) or nonzeros (sddmm) per task");
  app->add_option("--tile-y", o.tile_y, "rows per task group")->check(CLI::IsMember({1, 2, 4, 8}));
  app->add_option("--vector-width", o.vector_width, "1, 2 or 4")->check(CLI::IsMember({1, 2, 4}));
  app->add_flag("--no-load-balance", o.no_load_balance, "process rows in natural order");
  app->add_flag("--no-vector", o.no_vector, "scalar loads (vector width 1)");
  app->add_flag("--no-residue-unroll", o.no_residue_unroll, "bounds-checked residue loop");
  app->add_flag("--no-prescale", o.no_prescale, "do not pre-scale column indices");
}

inline void add_output_flags(CLI::App* app, OutputOptions& o) {
  app->add_option("--output", o.output, "write CSV here instead of stdout");
  app->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv"}));
  app->add_option("--threads", o.threads, "worker threads including the caller (0: all cores)");
}

inline void apply_threads(const OutputOptions& o) { set_default_threads(o.threads); }

/// stdout, or the --output file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

inline std::pair<std::size_t, std::size_t> parse_shape(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos) throw UsageError("--gen expects RxC, got \"" + s + "\"");
  try {
    std::size_t used = 0;
    const auto r = std::stoull(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const auto rest = s.substr(x + 1);
    const auto c = std::stoull(rest, &used);
    if (used != rest.size() || r == 0 || c == 0) throw std::invalid_argument(s);
    return {static_cast<std::size_t>(r), static_cast<std::size_t>(c)};
  } catch (const std::logic_error&) {
    throw UsageError("--gen expects positive RxC, got \"" + s + "\"");
  }
}

/// The sparse operand named by --matrix or --gen.
inline CsrMatrix<float> problem_matrix(const ProblemOptions& o) {
  if (o.matrix.empty() == o.gen.empty()) {
    throw UsageError("give exactly one of --matrix PATH or --gen RxC");
  }
  if (!o.matrix.empty()) return load_matrix(o.matrix);
  const auto [rows, cols] = parse_shape(o.gen);
  if (!(o.sparsity < 1.0)) throw UsageError("--sparsity must be below 1");
  const RowProfile profile = o.cov ? RowProfile::lognormal(*o.cov) : RowProfile::uniform();
  return random_csr(rows, cols, o.sparsity, o.seed, profile);
}

/// Default selection for `n`, then explicit tile flags, then --no-vector.
inline TileConfig resolve_config(const KernelOptions& o, std::size_t n, KernelKind kind) {
  TileConfig c = default_tile_config(n, kind);
  if (o.vector_width) c.vector_width = *o.vector_width;
  if (o.no_vector) c.vector_width = 1;
  if (o.tile_x) c.block_items_x = *o.tile_x;
  if (o.tile_y) c.block_items_y = *o.tile_y;
  if (o.tile_k) {
    c.block_items_k = *o.tile_k;
  } else if (c.block_items_k % (4 * c.vector_width) != 0) {
    c.block_items_k = 8 * c.vector_width;
  }
  if (c.block_items_x % c.vector_width != 0) {
    throw UsageError("--tile-x " + std::to_string(c.block_items_x) +
                     " is not a multiple of the vector width " + std::to_string(c.vector_width));
  }
  check_tile_config(c);
  return c;
}

std::string disabled_list(const KernelOptions& o);

void register_bench(CLI::App& app, Action& action);
void register_ablate(CLI::App& app, Action& action);
void register_check(CLI::App& app, Action& action);
void register_analyze(CLI::App& app, Action& action);
void register_simulate(CLI::App& app, Action& action);
void register_attention_bench(CLI::App& app, Action& action);

}  // namespace tilesparse::cli

#endif  // TILESPARSE_TOOLS_CLI_COMMON_HPP_
