#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "glws/gp.hpp"

namespace glws {

struct BenchOptions {
  int repeats = 5;             // timed repetitions (median reported)
  std::uint64_t seed = 7;
  int threads = 1;             // recorded in the output
  double equivalence_tol = 1e-8;
};

struct BenchRow {
  Eigen::Index n = 0;
  std::string path;  // "brute", "naive-recursive", "regrouped"
  double median_seconds = 0.0;
  int threads = 1;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log(time) vs log(n) for one path.
  double loglog_slope(const std::string& path) const;
  double time_at(const std::string& path, Eigen::Index n) const;
  void write_csv(std::ostream& os) const;  // header: n,path,median_seconds,threads
};

/// Measures the per-iteration cost of refreshing pool means/variances after
/// one new sample along three routes: (a) brute-force rebuild of the batch
/// prediction, (b) the recursive update with the posterior covariance column
/// computed through a pool-sized triangular solve, (c) the recursive update
/// with the regrouped n-vector solve and cached cross-covariance. All three
/// are checked to agree before any timing.
BenchResult benchmark_update_paths(Eigen::Index n_mc, const std::vector<Eigen::Index>& n_values,
                                   const BenchOptions& opts = {});

}  // namespace glws
