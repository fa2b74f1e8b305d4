// Command-line front end: sequential-sampling runs, ensembles, (t, alpha)
// sweeps, the pool-update timing benchmark, and ground-truth PDF export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "glws/bench_mcdo.hpp"
#include "glws/errors.hpp"
#include "glws/experiment.hpp"
#include "glws/io.hpp"
#include "glws/systems.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw glws::InvalidArgumentError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

glws::ExperimentConfig load_config(const std::string& path,
                                   const std::vector<std::string>& overrides) {
  glws::ExperimentConfig config = glws::ExperimentConfig::from_json_text(read_file(path));
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw glws::InvalidArgumentError("override must look like key=value: '" + kv + "'");
    config.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

fs::path resolve_output(const std::string& output_dir, const std::string& name) {
  fs::path p(name);
  if (p.is_absolute()) return p;
  fs::create_directories(output_dir);
  return fs::path(output_dir) / p;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoull(item));
  }
  if (out.empty()) throw glws::InvalidArgumentError("empty seed list '" + text + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw glws::InvalidArgumentError("empty list '" + text + "'");
  return out;
}

void write_run_metadata(const fs::path& trace_path, const glws::ExperimentConfig& config,
                        int threads) {
  std::ofstream meta(trace_path.string() + ".meta.json");
  meta << "{\n  \"threads\": " << threads << ",\n  \"config\": " << config.to_json_text()
       << "\n}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential GP sampling for rare-event response statistics"};
  app.require_subcommand(1);

  std::string output_dir = ".";
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  app.add_option("--output-dir", output_dir, "Directory for all generated files");
  app.add_option("--threads", threads, "Worker-thread cap for ensembles and sweeps");

  // run --------------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "One sequential-sampling experiment");
  std::string run_config_path, run_format = "csv";
  std::vector<std::string> run_overrides;
  cmd_run->add_option("--config", run_config_path, "Experiment config (JSON)")->required();
  cmd_run->add_option("--override", run_overrides,
                      "Dotted-path config override, e.g. acquisition.t=1.4");
  cmd_run->add_option("--format", run_format, "Trace format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // ensemble ---------------------------------------------------------------
  auto* cmd_ens = app.add_subcommand("ensemble", "Seed grid of experiments, aggregated");
  std::string ens_config_path, ens_function_seeds = "1", ens_init_seeds = "1";
  std::string ens_out = "ensemble.csv";
  std::vector<std::string> ens_overrides;
  cmd_ens->add_option("--config", ens_config_path, "Experiment config (JSON)")->required();
  cmd_ens->add_option("--function-seeds", ens_function_seeds, "Comma-separated seeds");
  cmd_ens->add_option("--init-seeds", ens_init_seeds, "Comma-separated seeds");
  cmd_ens->add_option("--override", ens_overrides, "Dotted-path config override");
  cmd_ens->add_option("--out", ens_out, "Aggregated CSV name");

  // sweep ------------------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "(t, alpha) grid of ensembles");
  std::string sw_config_path, sw_t = "1.0", sw_alpha = "0.0";
  std::string sw_function_seeds = "1", sw_init_seeds = "1", sw_out = "sweep.csv";
  std::vector<std::string> sw_overrides;
  cmd_sweep->add_option("--config", sw_config_path, "Experiment config (JSON)")->required();
  cmd_sweep->add_option("--t", sw_t, "Comma-separated t values (rows)");
  cmd_sweep->add_option("--alpha", sw_alpha, "Comma-separated alpha values (columns)");
  cmd_sweep->add_option("--function-seeds", sw_function_seeds, "Comma-separated seeds");
  cmd_sweep->add_option("--init-seeds", sw_init_seeds, "Comma-separated seeds");
  cmd_sweep->add_option("--override", sw_overrides, "Dotted-path config override");
  cmd_sweep->add_option("--out", sw_out, "Sweep matrix CSV name");

  // bench-mcdo -------------------------------------------------------------
  auto* cmd_bench = app.add_subcommand("bench-mcdo", "Time the pool-update paths");
  long long bench_n_mc = 50000;
  std::string bench_n = "100,200,400", bench_out = "bench_mcdo.csv";
  int bench_repeats = 5;
  cmd_bench->add_option("--n-mc", bench_n_mc, "Candidate-pool size");
  cmd_bench->add_option("--n", bench_n, "Comma-separated dataset sizes");
  cmd_bench->add_option("--repeats", bench_repeats, "Timed repetitions (median)");
  cmd_bench->add_option("--out", bench_out, "Timing CSV name");

  // export-pdf -------------------------------------------------------------
  auto* cmd_export = app.add_subcommand("export-pdf", "Ground-truth density to CSV");
  std::string exp_system = "oscillator", exp_out = "pdf.csv", exp_params;
  std::uint64_t exp_seed = 1;
  long long exp_m = 100000;
  int exp_grid = 400;
  cmd_export->add_option("--system", exp_system, "System id (see list-systems)");
  cmd_export->add_option("--seed", exp_seed, "Monte-Carlo / function seed");
  cmd_export->add_option("--m", exp_m, "Monte-Carlo sample count");
  cmd_export->add_option("--grid-size", exp_grid, "Density grid size");
  cmd_export->add_option("--params", exp_params, "System parameter overrides (JSON object)");
  cmd_export->add_option("--out", exp_out, "Density CSV name");

  // list-systems -----------------------------------------------------------
  auto* cmd_list = app.add_subcommand("list-systems", "Registered benchmark systems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      glws::ExperimentConfig config = load_config(run_config_path, run_overrides);
      config.validate();
      const std::string name = config.output_path.empty()
                                   ? (run_format == "json" ? "trace.json" : "trace.csv")
                                   : config.output_path;
      const fs::path trace_path = resolve_output(output_dir, name);
      if (config.cache_dir.empty())
        config.cache_dir = (fs::path(output_dir) / "gt-cache").string();

      glws::ErrorTrace trace;
      try {
        trace = glws::run_experiment(config);
      } catch (const glws::InvalidArgumentError&) {
        throw;  // nothing written on validation failures
      }
      trace.threads = 1;
      std::ofstream out(trace_path);
      if (run_format == "json") {
        out << trace.to_json_text(config.record_wall_time);
      } else {
        trace.write_csv(out, config.record_wall_time);
      }
      out.close();
      write_run_metadata(trace_path, config, 1);
      if (trace.failed) {
        std::cerr << "run failed after " << trace.records.size()
                  << " records: " << trace.failure << "\n";
        return kExitRuntime;
      }
      std::cout << "epsilon=" << glws::format_double(trace.terminal_epsilon()) << "\n";
      return kExitOk;
    }

    if (cmd_ens->parsed()) {
      glws::ExperimentConfig config = load_config(ens_config_path, ens_overrides);
      config.validate();
      if (config.cache_dir.empty())
        config.cache_dir = (fs::path(output_dir) / "gt-cache").string();
      const auto fseeds = parse_seed_list(ens_function_seeds);
      const auto iseeds = parse_seed_list(ens_init_seeds);
      const glws::EnsembleResult result = glws::run_ensemble(config, fseeds, iseeds, threads);
      std::ofstream out(resolve_output(output_dir, ens_out));
      result.write_csv(out);
      if (result.failures > 0)
        std::cerr << result.failures << " of " << result.traces.size()
                  << " runs failed and were excluded\n";
      std::cout << "terminal_mean_log10_epsilon="
                << glws::format_double(result.terminal_mean_log10()) << "\n";
      return result.failures == static_cast<int>(result.traces.size()) ? kExitRuntime
                                                                       : kExitOk;
    }

    if (cmd_sweep->parsed()) {
      glws::ExperimentConfig config = load_config(sw_config_path, sw_overrides);
      config.validate();
      if (config.cache_dir.empty())
        config.cache_dir = (fs::path(output_dir) / "gt-cache").string();
      const glws::SweepResult result =
          glws::sweep(config, parse_double_list(sw_t), parse_double_list(sw_alpha),
                      parse_seed_list(sw_function_seeds), parse_seed_list(sw_init_seeds),
                      threads);
      std::ofstream out(resolve_output(output_dir, sw_out));
      result.write_csv(out);
      return kExitOk;
    }

    if (cmd_bench->parsed()) {
      if (bench_n_mc < 1) throw glws::InvalidArgumentError("--n-mc must be positive");
      std::vector<Eigen::Index> sizes;
      for (double v : parse_double_list(bench_n)) sizes.push_back(static_cast<Eigen::Index>(v));
      glws::BenchOptions opts;
      opts.repeats = bench_repeats;
      opts.threads = 1;  // the update paths are single-threaded
      const glws::BenchResult result = glws::benchmark_update_paths(bench_n_mc, sizes, opts);
      std::ofstream out(resolve_output(output_dir, bench_out));
      result.write_csv(out);
      return kExitOk;
    }

    if (cmd_export->parsed()) {
      if (exp_m < 100) throw glws::InvalidArgumentError("--m too small");
      const glws::BenchmarkSystem system = glws::build_system(exp_system, exp_params, exp_seed);
      const glws::GroundTruth gt = glws::ground_truth_pdf(
          system.response, system.input, exp_m, exp_seed, exp_grid);
      std::ofstream out(resolve_output(output_dir, exp_out));
      gt.pdf.write_csv(out);
      return kExitOk;
    }

    if (cmd_list->parsed()) {
      for (const auto& [id, desc] : glws::list_systems())
        std::cout << id << "\t" << desc << "\n";
      return kExitOk;
    }
  } catch (const glws::InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
