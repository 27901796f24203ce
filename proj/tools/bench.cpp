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

#include <iomanip>
#include <string>
#include <vector>

#include "cli_common.hpp"

namespace tilesparse::cli {

std::string disabled_list(const KernelOptions& o) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ';';
    s += name;
  };
  add(o.no_load_balance, "load-balance");
  add(o.no_vector, "vector");
  add(o.no_residue_unroll, "residue-unroll");
  add(o.no_prescale, "index-prescale");
  return s.empty() ? "none" : s;
}

namespace {

struct BenchArgs {
  std::string kernel = "spmm";
  ProblemOptions problem;
  KernelOptions kernel_opts;
  OutputOptions out;
  harness::TimingPlan plan;
  bool reference = false;
};

struct Row {
  std::string kernel;
  std::size_t m, k, n, nnz;
  double sparsity;
  std::string precision;
  TileConfig cfg;
  std::string disabled;
  harness::Timing t;
  double gflops;
};

constexpr const char* kBenchHeader =
    "kernel,m,k,n,nnz,sparsity,precision,tile_k,tile_x,tile_y,vector_width,disabled,threads,"
    "repeats,runtime_ns,spread,gflops_effective";

void write_row(std::ostream& os, const Row& r) {
  os << r.kernel << ',' << r.m << ',' << r.k << ',' << r.n << ',' << r.nnz << ','
     << std::setprecision(6) << r.sparsity << ',' << r.precision << ',' << r.cfg.block_items_k
     << ',' << r.cfg.block_items_x << ',' << r.cfg.block_items_y << ',' << r.cfg.vector_width
     << ',' << r.disabled << ',' << default_pool().size() << ',' << r.t.repeats << ','
     << std::fixed << std::setprecision(0) << r.t.median_ns << std::defaultfloat << ','
     << std::setprecision(4) << r.t.spread << ',' << r.gflops << '\n';
}

void check_plan(const harness::TimingPlan& p) {
  if (p.repeats < 20) throw UsageError("--repeats must be at least 20");
  if (p.warmup < 3) throw UsageError("--warmup must be at least 3");
}

int run_bench(const BenchArgs& a) {
  check_plan(a.plan);
  apply_threads(a.out);
  const auto m = problem_matrix(a.problem);
  const std::size_t n = a.problem.n;
  const bool half_precision = a.problem.precision == "f16";
  const auto stats = compute_stats(m);
  Output out(a.out.output);
  auto& os = out.stream();
  os << kBenchHeader << '\n';

  if (a.kernel == "spmm") {
    const auto cfg = resolve_config(a.kernel_opts, n, KernelKind::kSpmm);
    SpmmOptions opts;
    opts.residue_unroll = !a.kernel_opts.no_residue_unroll;
    opts.prescale = !a.kernel_opts.no_prescale;
    const RowSwizzle swz = build_row_swizzle(m);
    if (!a.kernel_opts.no_load_balance) opts.swizzle = &swz;
    const auto b = random_dense<float>(m.cols(), n, a.problem.seed + 1);
    Row row{"spmm", m.rows(), m.cols(), n, m.nnz(), stats.sparsity, a.problem.precision, cfg,
            disabled_list(a.kernel_opts), {}, 0.0};
    if (half_precision) {
      const auto mh = convert_csr<half, std::uint16_t>(m);
      const auto bh = convert_dense<half>(b);
      row.t = harness::time_it([&] { (void)spmm_mixed(mh, bh, cfg, opts); }, a.plan);
    } else {
      row.t = harness::time_it([&] { (void)spmm(m, b, cfg, opts); }, a.plan);
    }
    row.gflops = harness::gflops(m.nnz(), n, row.t.median_ns);
    write_row(os, row);
    if (a.reference) {
      Row ref = row;
      ref.kernel = "spmm_reference";
      ref.disabled = "n/a";
      ref.precision = "f32";
      ref.t = harness::time_it([&] { (void)spmm_reference(m, b); }, a.plan);
      ref.gflops = harness::gflops(m.nnz(), n, ref.t.median_ns);
      write_row(os, ref);
    }
    return kOk;
  }

  // sddmm: the matrix is the M x N output pattern and --n the inner size.
  const auto cfg = resolve_config(a.kernel_opts, n, KernelKind::kSddmm);
  SddmmOptions opts;
  const RowSwizzle swz = build_row_swizzle(m);
  if (!a.kernel_opts.no_load_balance) opts.swizzle = &swz;
  const auto lhs = random_dense<float>(m.rows(), n, a.problem.seed + 1);
  const auto rhs = random_dense<float>(m.cols(), n, a.problem.seed + 2);
  Row row{"sddmm", m.rows(), n, m.cols(), m.nnz(), stats.sparsity, a.problem.precision, cfg,
          disabled_list(a.kernel_opts), {}, 0.0};
  if (half_precision) {
    const auto ph = convert_csr<half, std::uint16_t>(m);
    const auto lh = convert_dense<half>(lhs);
    const auto rh = convert_dense<half>(rhs);
    const SddmmProblem<half, std::uint16_t> prob{lh, rh, ph};
    row.t = harness::time_it([&] { (void)sddmm(prob, cfg, opts); }, a.plan);
  } else {
    const SddmmProblem<float> prob{lhs, rhs, m};
    row.t = harness::time_it([&] { (void)sddmm(prob, cfg, opts); }, a.plan);
  }
  row.gflops = harness::gflops(m.nnz(), n, row.t.median_ns);
  write_row(os, row);
  if (a.reference) {
    Row ref = row;
    ref.kernel = "sddmm_reference";
    ref.disabled = "n/a";
    ref.precision = "f32";
    const SddmmProblem<float> prob{lhs, rhs, m};
    ref.t = harness::time_it([&] { (void)sddmm_reference(prob); }, a.plan);
    ref.gflops = harness::gflops(m.nnz(), n, ref.t.median_ns);
    write_row(os, ref);
  }
  return kOk;
}

constexpr const char* kAblateHeader =
    "kernel,toggle,tile_k,tile_x,tile_y,vector_width,max_error,verified,runtime_ns,spread,"
    "gflops_effective,relative_performance";

int run_ablate(const BenchArgs& a) {
  check_plan(a.plan);
  if (a.problem.precision != "f32") throw UsageError("ablate runs the f32 kernels only");
  apply_threads(a.out);
  const auto m = problem_matrix(a.problem);
  const std::size_t n = a.problem.n;
  std::vector<harness::AblationRow> rows;
  if (a.kernel == "spmm") {
    const auto cfg = resolve_config(a.kernel_opts, n, KernelKind::kSpmm);
    const auto b = random_dense<float>(m.cols(), n, a.problem.seed + 1);
    rows = harness::ablate_spmm(m, b, cfg, a.plan);
  } else {
    const auto cfg = resolve_config(a.kernel_opts, n, KernelKind::kSddmm);
    const auto lhs = random_dense<float>(m.rows(), n, a.problem.seed + 1);
    const auto rhs = random_dense<float>(m.cols(), n, a.problem.seed + 2);
    rows = harness::ablate_sddmm(m, lhs, rhs, cfg, a.plan);
  }

  Output out(a.out.output);
  auto& os = out.stream();
  os << kAblateHeader << '\n';
  bool all_verified = true;
  for (const auto& r : rows) {
    all_verified &= r.verified;
    os << r.kernel << ',' << r.toggle << ',' << r.config.block_items_k << ','
       << r.config.block_items_x << ',' << r.config.block_items_y << ','
       << r.config.vector_width << ',' << std::setprecision(3) << std::scientific << r.max_error
       << std::defaultfloat << ',' << (r.verified ? "true" : "false") << ',';
    if (r.verified) {
      os << std::fixed << std::setprecision(0) << r.timing.median_ns << std::defaultfloat << ','
         << std::setprecision(4) << r.timing.spread << ',' << r.gflops << ','
         << std::fixed << std::setprecision(1) << r.relative_performance << std::defaultfloat;
    } else {
      os << ",,,";
    }
    os << '\n';
  }
  if (!all_verified) {
    std::cerr << "error: a variant failed the oracle check; its timing is not reported\n";
    return kCheckFailed;
  }
  return kOk;
}

void add_common(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("kernel", a.kernel, "spmm or sddmm")
      ->check(CLI::IsMember({"spmm", "sddmm"}))
      ->required();
  add_problem_flags(cmd, a.problem);
  add_kernel_flags(cmd, a.kernel_opts);
  add_output_flags(cmd, a.out);
  cmd->add_option("--repeats", a.plan.repeats, "timed repetitions (at least 20)");
  cmd->add_option("--warmup", a.plan.warmup, "untimed warmup runs (at least 3)");
}

}  // namespace

void register_bench(CLI::App& app, Action& action) {
  auto args = std::make_shared<BenchArgs>();
  auto* cmd = app.add_subcommand("bench", "time one kernel configuration; median of the repeats");
  add_common(cmd, *args);
  cmd->add_flag("--reference", args->reference, "also time the naive reference kernel");
  cmd->callback([args, &action] { action = [args] { return run_bench(*args); }; });
}

void register_ablate(CLI::App& app, Action& action) {
  auto args = std::make_shared<BenchArgs>();
  auto* cmd = app.add_subcommand(
      "ablate", "switch each optimization off in turn; throughput relative to the full kernel");
  add_common(cmd, *args);
  cmd->callback([args, &action] { action = [args] { return run_ablate(*args); }; });
}

}  // namespace tilesparse::cli
