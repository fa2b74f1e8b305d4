#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glws/acquisition.hpp"
#include "glws/kernel.hpp"

namespace glws {

enum class AcquisitionMode { LwPointwise, GlwPointwise, LwIntegral };

std::string to_string(AcquisitionMode mode);
AcquisitionMode acquisition_mode_from_string(const std::string& s);

struct HyperfitSchedule {
  int restarts = 5;
  int small_threshold = 50;  // refit every iteration while n is below this
  int interval = 5;          // refit cadence afterwards
};

struct ExperimentConfig {
  std::string system = "oscillator";
  std::string system_params;  // JSON object with per-system overrides, "" = defaults
  KernelFamily surrogate_kernel = KernelFamily::RBF;
  int n_init = 4;
  int n_seq = 96;
  AcquisitionMode mode = AcquisitionMode::GlwPointwise;
  AcquisitionParams acquisition{};
  Eigen::Index n_mc = 100000;        // candidate-pool size
  Eigen::Index mc_set_size = 100000; // ground-truth / PDF Monte-Carlo set
  std::uint64_t function_seed = 1;
  std::uint64_t init_seed = 1;
  std::uint64_t pool_seed = 1;
  double density_floor = 1e-16;
  int kde_grid_size = 400;
  HyperfitSchedule hyperfit{};
  int integral_subcandidates = 500;
  double divergence_cap = 1e6;       // response recorded when the solver diverges
  std::uint64_t memory_budget_bytes = 2ull << 30;
  bool record_wall_time = false;
  std::string output_path;           // trace CSV destination ("" = none)
  std::string cache_dir;             // ground-truth cache ("" = no cache)

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);  // rejects unknown keys
  std::string to_json_text() const;
  /// Applies one dotted-path override such as "acquisition.t=1.4".
  void apply_override(const std::string& key, const std::string& value);
};

struct TraceRecord {
  int iteration = 0;
  double epsilon = 0.0;
  Eigen::VectorXd x;   // NaN on the post-initialization record
  double y = 0.0;
  double acq_value = 0.0;
  double wall_s = 0.0;
};

struct ErrorTrace {
  std::vector<TraceRecord> records;  // n_seq + 1 entries when the run completes
  Eigen::Index dim = 0;
  bool failed = false;
  std::string failure;
  std::uint64_t function_seed = 0, init_seed = 0, pool_seed = 0;
  int threads = 1;

  double terminal_epsilon() const;
  /// Header: iter,epsilon,x0,...,x{d-1},y,acq_value,wall_s. Wall times are
  /// zeroed unless requested so reruns are byte-identical.
  void write_csv(std::ostream& os, bool include_wall_time) const;
  std::string to_json_text(bool include_wall_time) const;
};

/// Runs the sequential sampling loop: LHS initialization, per-schedule
/// hyperparameter refits, surrogate-PDF construction over the fixed MC set,
/// pool scoring, selection, evaluation, recursive cache refresh, and the
/// per-iteration log-PDF error against the cached ground truth.
ErrorTrace run_experiment(const ExperimentConfig& config);

struct EnsembleResult {
  std::vector<ErrorTrace> traces;  // function-seed major, init-seed minor
  int failures = 0;
  std::vector<double> mean_epsilon;        // per iteration
  std::vector<double> median_epsilon;
  std::vector<double> mean_log10_epsilon;
  std::vector<int> counts;

  double terminal_mean_log10() const;
  double terminal_median() const;
  void write_csv(std::ostream& os) const;
};

EnsembleResult run_ensemble(const ExperimentConfig& base,
                            const std::vector<std::uint64_t>& function_seeds,
                            const std::vector<std::uint64_t>& init_seeds, int threads = 1);

struct SweepResult {
  std::vector<double> t_values;      // rows
  std::vector<double> alpha_values;  // columns
  Eigen::MatrixXd mean_log10_terminal;
  void write_csv(std::ostream& os) const;
};

/// Grid of (t, alpha) cells, every cell sharing the same seed lists so the
/// initial designs and pools match exactly across cells.
SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& t_values,
                  const std::vector<double>& alpha_values,
                  const std::vector<std::uint64_t>& function_seeds,
                  const std::vector<std::uint64_t>& init_seeds, int threads = 1);

}  // namespace glws
