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
namespace {

struct SimulateArgs {
  std::string gen = "8192x2048";
  double sparsity = 0.75;
  std::size_t n = 128;
  int sms = 80;
  int blocks_per_sm = 1;
  std::vector<double> covs;
  double cov_min = 0.2;
  double cov_max = 2.0;
  int points = 10;
  std::uint64_t seed = 1;
  KernelOptions kernel_opts;
  OutputOptions out;
};

int run_simulate(const SimulateArgs& a) {
  const auto [rows, cols] = parse_shape(a.gen);
  if (!(a.sparsity >= 0.0 && a.sparsity < 1.0)) throw UsageError("--sparsity must be in [0, 1)");
  if (a.sms < 2 || a.sms % 2) throw UsageError("--sms must be a positive even number");
  if (a.blocks_per_sm < 1) throw UsageError("--blocks-per-sm must be at least 1");
  std::vector<double> covs = a.covs;
  if (covs.empty()) {
    if (a.points < 1) throw UsageError("--points must be at least 1");
    for (int i = 0; i < a.points; ++i) {
      covs.push_back(a.points == 1 ? a.cov_min
                                   : a.cov_min + (a.cov_max - a.cov_min) * i / (a.points - 1));
    }
  }
  const TileConfig cfg = resolve_config(a.kernel_opts, a.n, KernelKind::kSpmm);
  const auto model = SchedulerModel::with_sms(a.sms, a.blocks_per_sm);
  const auto points = cov_sweep(rows, cols, a.sparsity, a.n, covs, model, a.seed, &cfg);

  Output out(a.out.output);
  auto& os = out.stream();
  os << "cov,unswizzled_imbalance,swizzled_imbalance,wave_count,measured_cov\n";
  for (const auto& p : points) {
    os << std::setprecision(6) << p.cov << ',' << p.unswizzled_imbalance << ','
       << p.swizzled_imbalance << ',' << p.wave_count << ',' << p.measured_cov << '\n';
  }
  return kOk;
}

}  // namespace

void register_simulate(CLI::App& app, Action& action) {
  auto args = std::make_shared<SimulateArgs>();
  auto* cmd = app.add_subcommand(
      "simulate", "row-length CoV sweep through the thread block scheduler model");
  cmd->add_option("--gen", args->gen, "matrix shape RxC");
  cmd->add_option("--sparsity", args->sparsity, "fraction of zeros");
  cmd->add_option("--n", args->n, "output columns")->check(CLI::PositiveNumber);
  cmd->add_option("--sms", args->sms, "streaming multiprocessors (even)");
  cmd->add_option("--blocks-per-sm", args->blocks_per_sm, "resident blocks per SM");
  cmd->add_option("--cov", args->covs, "explicit CoV values (overrides the sweep range)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--cov-min", args->cov_min, "first CoV of the sweep");
  cmd->add_option("--cov-max", args->cov_max, "last CoV of the sweep");
  cmd->add_option("--points", args->points, "number of sweep points");
  cmd->add_option("--seed", args->seed, "generator seed");
  add_kernel_flags(cmd, args->kernel_opts);
  add_output_flags(cmd, args->out);
  cmd->callback([args, &action] { action = [args] { return run_simulate(*args); }; });
}

}  // namespace tilesparse::cli
