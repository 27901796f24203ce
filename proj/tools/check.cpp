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

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>
#include <vector>

#include "cli_common.hpp"

namespace tilesparse::cli {
namespace {

struct CheckArgs {
  bool quick = false;
  bool inject_fault = false;
  std::uint64_t seed = 1;
  OutputOptions out;
};

struct Cell {
  std::string kernel;
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_error <= tolerance; }
  void add(double e) {
    ++cases;
    if (!(e <= max_error)) max_error = std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
  }
};

/// Dense attention in f64 with masked positions removed.
double attention_error(const DenseMatrix<float>& q, const DenseMatrix<float>& k,
                       const DenseMatrix<float>& v, const CsrMatrix<float>& mask,
                       const DenseMatrix<float>& got) {
  const std::size_t dk = q.cols(), dv = v.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  double worst = 0.0;
  for (std::size_t i = 0; i < mask.rows(); ++i) {
    std::vector<double> want(dv, 0.0);
    if (mask.row_length(i) > 0) {
      std::vector<double> s;
      double mx = -std::numeric_limits<double>::infinity();
      for (Offset j = mask.row_begin(i); j < mask.row_end(i); ++j) {
        const auto c = static_cast<std::size_t>(mask.col_indices()[j]);
        double d = 0.0;
        for (std::size_t t = 0; t < dk; ++t) d += static_cast<double>(q(i, t)) * k(c, t);
        s.push_back(d * scale);
        mx = std::max(mx, s.back());
      }
      double z = 0.0;
      for (double x : s) z += std::exp(x - mx);
      std::size_t idx = 0;
      for (Offset j = mask.row_begin(i); j < mask.row_end(i); ++j, ++idx) {
        const auto c = static_cast<std::size_t>(mask.col_indices()[j]);
        const double p = std::exp(s[idx] - mx) / z;
        for (std::size_t t = 0; t < dv; ++t) want[t] += p * v(c, t);
      }
    }
    for (std::size_t t = 0; t < dv; ++t) {
      worst = std::max(worst, std::fabs(static_cast<double>(got(i, t)) - want[t]));
    }
  }
  return worst;
}

int run_check(const CheckArgs& a) {
  apply_threads(a.out);
  const std::vector<std::size_t> dims =
      a.quick ? std::vector<std::size_t>{1, 17, 33} : std::vector<std::size_t>{1, 3, 16, 33, 65};
  const std::vector<double> sparsities =
      a.quick ? std::vector<double>{0.5, 0.9} : std::vector<double>{0.5, 0.7, 0.9, 0.98};
  const std::vector<std::size_t> inner =
      a.quick ? std::vector<std::size_t>{1, 33} : std::vector<std::size_t>{1, 4, 32, 33, 64};
  std::vector<Cell> cells;
  std::uint64_t seed = a.seed;
  bool fault_pending = a.inject_fault;

  for (int vw : {1, 2, 4}) {
    for (int y : {1, 4}) {
      Cell cell{"spmm", "vw" + std::to_string(vw) + "_y" + std::to_string(y), 0, 0.0,
                harness::kF32Tolerance};
      const TileConfig cfg{8 * vw, 8 * vw, y, vw};
      for (auto m : dims)
        for (auto k : dims)
          for (auto n : dims)
            for (double s : sparsities) {
              const auto sp = random_csr(m, k, s, ++seed);
              const auto b = random_dense<float>(k, n, ++seed);
              auto c = spmm(sp, b, cfg);
              if (fault_pending) {
                // Harness self-test: corrupt one output element.
                c.data()[0] += 1e-3f * (1.0f + std::fabs(c.data()[0]));
                fault_pending = false;
              }
              cell.add(harness::spmm_error(sp, b, c));
            }
      cells.push_back(cell);
    }
  }

  for (int vw : {1, 2, 4}) {
    for (int y : {1, 4}) {
      Cell cell{"sddmm", "vw" + std::to_string(vw) + "_y" + std::to_string(y), 0, 0.0,
                harness::kF32Tolerance};
      const TileConfig cfg{4 * vw, 8 * vw, y, vw};
      for (auto m : dims)
        for (auto n : dims)
          for (auto k : inner)
            for (double s : sparsities) {
              const auto pattern = random_csr(m, n, s, ++seed);
              const auto lhs = random_dense<float>(m, k, ++seed);
              const auto rhs = random_dense<float>(n, k, ++seed);
              const auto d = sddmm(SddmmProblem<float>{lhs, rhs, pattern}, cfg);
              cell.add(d.same_structure(pattern) ? harness::sddmm_error(lhs, rhs, d)
                                                 : std::numeric_limits<double>::infinity());
            }
      cells.push_back(cell);
    }
  }

  {
    Cell cell{"mixed", "f16_spmm", 0, 0.0, 1e-2};
    const std::vector<std::size_t> ks =
        a.quick ? std::vector<std::size_t>{64, 1024} : std::vector<std::size_t>{16, 256, 1024, 4096};
    for (auto k : ks) {
      for (std::size_t n : {8u, 33u, 64u}) {
        const auto sp = convert_csr<half, std::uint16_t>(random_csr(64, k, 0.8, ++seed));
        const auto b = convert_dense<half>(random_dense<float>(k, n, ++seed));
        cell.add(harness::spmm_error(sp, b, spmm_mixed(sp, b, default_tile_config(n))));
      }
    }
    cells.push_back(cell);
  }

  {
    Cell cell{"attention", "random_masks", 0, 0.0, 1e-4};
    const std::size_t step = a.quick ? 9 : 1;
    for (std::size_t L = 1; L <= 64; L += step) {
      AttentionMaskSpec spec;
      spec.seq_len = L;
      spec.band = 1 + L / 4;
      spec.off_diag_sparsity = 0.6;
      spec.seed = ++seed;
      const auto mask = generate_mask(spec);
      const auto q = random_dense<float>(L, 32, ++seed);
      const auto k = random_dense<float>(L, 32, ++seed);
      const auto v = random_dense<float>(L, 16, ++seed);
      cell.add(attention_error(q, k, v, mask, sparse_attention(q, k, v, mask)));
    }
    cells.push_back(cell);
  }

  Output out(a.out.output);
  auto& os = out.stream();
  os << "kernel,cell,cases,max_error,tolerance,status\n";
  bool ok = true;
  for (const auto& c : cells) {
    ok &= c.passed();
    os << c.kernel << ',' << c.name << ',' << c.cases << ',' << std::scientific
       << std::setprecision(3) << c.max_error << ',' << c.tolerance << std::defaultfloat << ','
       << (c.passed() ? "pass" : "FAIL") << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

void register_check(CLI::App& app, Action& action) {
  auto args = std::make_shared<CheckArgs>();
  auto* cmd = app.add_subcommand("check", "run the oracle-equivalence grid; exit 1 on any failure");
  cmd->add_flag("--quick", args->quick, "smaller grid");
  cmd->add_flag("--inject-fault", args->inject_fault,
                "corrupt one kernel output to confirm the harness catches it");
  cmd->add_option("--seed", args->seed, "seed for generated operands");
  add_output_flags(cmd, args->out);
  cmd->callback([args, &action] { action = [args] { return run_check(*args); }; });
}

}  // namespace tilesparse::cli
