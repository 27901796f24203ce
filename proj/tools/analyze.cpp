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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_common.hpp"

namespace tilesparse::cli {
namespace {

namespace fs = std::filesystem;

struct AnalyzeArgs {
  std::vector<std::string> paths;
  std::vector<std::string> against;
  std::string histogram_output;
  int bins = 10;
  OutputOptions out;
};

struct Entry {
  std::string corpus;
  std::string path;
  MatrixStats stats;
};

struct Corpus {
  std::vector<Entry> entries;
  int failures = 0;
};

bool is_matrix_file(const fs::path& p) {
  const auto ext = p.extension();
  return ext == ".smtx" || ext == ".mtx";
}

std::vector<fs::path> expand(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && is_matrix_file(e.path())) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(p);
    }
  }
  return files;
}

Corpus load_corpus(const std::string& name, const std::vector<std::string>& paths) {
  Corpus c;
  for (const auto& f : expand(paths)) {
    try {
      c.entries.push_back({name, f.string(), compute_stats(load_matrix(f))});
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      ++c.failures;
    }
  }
  return c;
}

struct Means {
  double sparsity = 0, avg_row_length = 0, cov = 0;
  double rows = 0, cols = 0, nnz = 0, min_len = 0, max_len = 0;
  std::size_t cov_count = 0;
};

Means means(const Corpus& c) {
  Means m;
  for (const auto& e : c.entries) {
    m.sparsity += e.stats.sparsity;
    m.avg_row_length += e.stats.avg_row_length;
    m.rows += static_cast<double>(e.stats.rows);
    m.cols += static_cast<double>(e.stats.cols);
    m.nnz += static_cast<double>(e.stats.nnz);
    m.min_len += static_cast<double>(e.stats.min_row_length);
    m.max_len += static_cast<double>(e.stats.max_row_length);
    if (e.stats.row_cov) {
      m.cov += *e.stats.row_cov;
      ++m.cov_count;
    }
  }
  const double n = std::max<double>(1.0, static_cast<double>(c.entries.size()));
  m.sparsity /= n;
  m.avg_row_length /= n;
  m.rows /= n;
  m.cols /= n;
  m.nnz /= n;
  m.min_len /= n;
  m.max_len /= n;
  if (m.cov_count) m.cov /= static_cast<double>(m.cov_count);
  return m;
}

constexpr const char* kStatsHeader =
    "corpus,path,rows,cols,nnz,sparsity,avg_row_length,row_cov,min_row_length,max_row_length";

void write_entry(std::ostream& os, const Entry& e) {
  os << e.corpus << ',' << e.path << ',' << e.stats.rows << ',' << e.stats.cols << ','
     << e.stats.nnz << ',' << std::setprecision(8) << e.stats.sparsity << ','
     << e.stats.avg_row_length << ',';
  if (e.stats.row_cov) os << *e.stats.row_cov;
  os << ',' << e.stats.min_row_length << ',' << e.stats.max_row_length << '\n';
}

void write_means(std::ostream& os, const std::string& corpus, const Means& m) {
  os << corpus << ",aggregate," << std::setprecision(8) << m.rows << ',' << m.cols << ','
     << m.nnz << ',' << m.sparsity << ',' << m.avg_row_length << ',';
  if (m.cov_count) os << m.cov;
  os << ',' << m.min_len << ',' << m.max_len << '\n';
}

std::optional<double> ratio(double a, double b) {
  if (b == 0.0) return std::nullopt;
  return a / b;
}

void write_ratio(std::ostream& os, const Means& a, const Means& b) {
  auto field = [&](std::optional<double> v) {
    if (v) os << *v;
  };
  os << "ratio,primary/against," << std::setprecision(8);
  field(ratio(a.rows, b.rows));
  os << ',';
  field(ratio(a.cols, b.cols));
  os << ',';
  field(ratio(a.nnz, b.nnz));
  os << ',';
  field(ratio(a.sparsity, b.sparsity));
  os << ',';
  field(ratio(a.avg_row_length, b.avg_row_length));
  os << ',';
  if (a.cov_count && b.cov_count) field(ratio(a.cov, b.cov));
  os << ',';
  field(ratio(a.min_len, b.min_len));
  os << ',';
  field(ratio(a.max_len, b.max_len));
  os << '\n';
}

struct Histogram {
  std::string metric;
  std::vector<double> edges;  // bins + 1 edges
  bool log_spaced = false;
};

Histogram make_bins(const std::string& metric, const std::vector<double>& values, int bins,
                    bool log_spaced) {
  Histogram h{metric, {}, log_spaced};
  if (!log_spaced) {
    for (int i = 0; i <= bins; ++i) h.edges.push_back(static_cast<double>(i) / bins);
    return h;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : values) {
    if (v > 0.0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > 0.0)) return h;
  if (hi <= lo) hi = lo * 1.0001;
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i <= bins; ++i) {
    h.edges.push_back(std::pow(10.0, llo + (lhi - llo) * i / bins));
  }
  h.edges.front() = lo;
  h.edges.back() = hi;
  return h;
}

/// Counts per bin; the last bin is closed. Non-positive values on a log
/// axis get a separate [0, 0] row.
void write_histogram(std::ostream& os, const Histogram& h, const std::string& corpus,
                     const std::vector<double>& values) {
  std::size_t zeros = 0;
  std::vector<std::size_t> counts(h.edges.empty() ? 0 : h.edges.size() - 1, 0);
  for (double v : values) {
    if (h.log_spaced && v <= 0.0) {
      ++zeros;
      continue;
    }
    if (counts.empty()) continue;
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t bin = it == h.edges.begin() ? 0 : static_cast<std::size_t>(it - h.edges.begin()) - 1;
    bin = std::min(bin, counts.size() - 1);
    ++counts[bin];
  }
  os << std::setprecision(6);
  if (h.log_spaced) os << h.metric << ",log,0,0," << corpus << ',' << zeros << '\n';
  for (std::size_t i = 0; i < counts.size(); ++i) {
    os << h.metric << ',' << (h.log_spaced ? "log" : "linear") << ',' << h.edges[i] << ','
       << h.edges[i + 1] << ',' << corpus << ',' << counts[i] << '\n';
  }
}

int run_analyze(const AnalyzeArgs& a) {
  if (a.bins < 1) throw UsageError("--bins must be at least 1");
  const Corpus primary = load_corpus("primary", a.paths);
  std::optional<Corpus> other;
  if (!a.against.empty()) other = load_corpus("against", a.against);

  Output out(a.out.output);
  auto& os = out.stream();
  os << kStatsHeader << '\n';
  for (const auto& e : primary.entries) write_entry(os, e);
  const Means pm = means(primary);
  write_means(os, "primary", pm);
  if (other) {
    for (const auto& e : other->entries) write_entry(os, e);
    const Means om = means(*other);
    write_means(os, "against", om);
    write_ratio(os, pm, om);
  }

  std::vector<const Corpus*> corpora{&primary};
  if (other) corpora.push_back(&*other);
  std::vector<double> all_len, all_cov;
  for (const auto* c : corpora)
    for (const auto& e : c->entries) {
      all_len.push_back(e.stats.avg_row_length);
      all_cov.push_back(e.stats.row_cov.value_or(0.0));
    }
  const auto len_bins = make_bins("avg_row_length", all_len, a.bins, true);
  const auto cov_bins = make_bins("row_cov", all_cov, a.bins, true);
  const auto sp_bins = make_bins("sparsity", {}, a.bins, false);

  std::unique_ptr<Output> hist_file;
  std::ostream* hs = &os;
  if (!a.histogram_output.empty()) {
    hist_file = std::make_unique<Output>(a.histogram_output);
    hs = &hist_file->stream();
  } else {
    os << '\n';
  }
  *hs << "metric,scale,bin_lo,bin_hi,corpus,count\n";
  for (const auto* c : corpora) {
    const std::string name = c == &primary ? "primary" : "against";
    std::vector<double> len, cov, sp;
    for (const auto& e : c->entries) {
      len.push_back(e.stats.avg_row_length);
      cov.push_back(e.stats.row_cov.value_or(0.0));
      sp.push_back(e.stats.sparsity);
    }
    write_histogram(*hs, len_bins, name, len);
    write_histogram(*hs, cov_bins, name, cov);
    write_histogram(*hs, sp_bins, name, sp);
  }
  const int failures = primary.failures + (other ? other->failures : 0);
  return failures ? kIo : kOk;
}

}  // namespace

void register_analyze(CLI::App& app, Action& action) {
  auto args = std::make_shared<AnalyzeArgs>();
  auto* cmd = app.add_subcommand("analyze", "per-matrix statistics, corpus means and histograms");
  cmd->add_option("paths", args->paths, "matrix files or directories")->required();
  cmd->add_option("--against", args->against, "second corpus for a ratio row");
  cmd->add_option("--histogram-output", args->histogram_output,
                  "write the histogram CSV here (default: after the stats CSV)");
  cmd->add_option("--bins", args->bins, "bins per histogram");
  add_output_flags(cmd, args->out);
  cmd->callback([args, &action] { action = [args] { return run_analyze(*args); }; });
}

}  // namespace tilesparse::cli
