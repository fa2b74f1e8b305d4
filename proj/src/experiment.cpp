#include "glws/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "glws/errors.hpp"
#include "glws/io.hpp"
#include "glws/fit.hpp"
#include "glws/pool.hpp"
#include "glws/systems.hpp"

namespace glws {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

json mode_to_json(AcquisitionMode m) { return to_string(m); }

KernelFamily family_from_string(const std::string& s) {
  if (s == "rbf") return KernelFamily::RBF;
  if (s == "matern") return KernelFamily::Matern;
  throw InvalidArgumentError("unknown kernel family '" + s + "'");
}

std::string family_to_string(KernelFamily f) {
  return f == KernelFamily::RBF ? "rbf" : "matern";
}

}  // namespace

std::string to_string(AcquisitionMode mode) {
  switch (mode) {
    case AcquisitionMode::LwPointwise: return "lw-pointwise";
    case AcquisitionMode::GlwPointwise: return "glw-pointwise";
    case AcquisitionMode::LwIntegral: return "lw-integral";
  }
  return "";
}

AcquisitionMode acquisition_mode_from_string(const std::string& s) {
  if (s == "lw-pointwise") return AcquisitionMode::LwPointwise;
  if (s == "glw-pointwise") return AcquisitionMode::GlwPointwise;
  if (s == "lw-integral") return AcquisitionMode::LwIntegral;
  throw InvalidArgumentError("unknown acquisition mode '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (n_init < 1) throw InvalidArgumentError("config: n_init must be positive");
  if (n_seq < 1) throw InvalidArgumentError("config: n_seq must be at least 1");
  if (n_mc < 100) throw InvalidArgumentError("config: n_mc must be at least 100");
  if (mc_set_size < 10000)
    throw InvalidArgumentError("config: mc_set_size must be at least 10^4");
  if (!(density_floor > 0.0)) throw InvalidArgumentError("config: density floor must be positive");
  if (kde_grid_size < 16) throw InvalidArgumentError("config: kde_grid_size too small");
  if (hyperfit.restarts < 1 || hyperfit.interval < 1)
    throw InvalidArgumentError("config: invalid hyperfit schedule");
  if (integral_subcandidates < 1)
    throw InvalidArgumentError("config: integral_subcandidates must be positive");
  acquisition.validate();
}

namespace {

// Field-for-field JSON mirror; unknown keys anywhere are rejected.
void check_keys(const json& j, std::initializer_list<const char*> known,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw InvalidArgumentError("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgumentError("config: top level must be an object");
  check_keys(j,
             {"system", "system_params", "surrogate_kernel", "n_init", "n_seq", "mode",
              "acquisition", "n_mc", "mc_set_size", "seeds", "density_floor",
              "kde_grid_size", "hyperfit", "integral_subcandidates", "divergence_cap",
              "memory_budget_bytes", "record_wall_time", "output_path", "cache_dir"},
             "config");
  ExperimentConfig c;
  try {
    if (j.contains("system")) c.system = j.at("system").get<std::string>();
    if (j.contains("system_params")) {
      if (!j.at("system_params").is_object())
        throw InvalidArgumentError("config: system_params must be an object");
      c.system_params = j.at("system_params").dump();
    }
    if (j.contains("surrogate_kernel"))
      c.surrogate_kernel = family_from_string(j.at("surrogate_kernel").get<std::string>());
    if (j.contains("n_init")) c.n_init = j.at("n_init").get<int>();
    if (j.contains("n_seq")) c.n_seq = j.at("n_seq").get<int>();
    if (j.contains("mode"))
      c.mode = acquisition_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("acquisition")) {
      const json& a = j.at("acquisition");
      check_keys(a, {"t", "alpha"}, "acquisition");
      if (a.contains("t")) c.acquisition.t = a.at("t").get<double>();
      if (a.contains("alpha")) c.acquisition.alpha = a.at("alpha").get<double>();
    }
    if (j.contains("n_mc")) c.n_mc = j.at("n_mc").get<Eigen::Index>();
    if (j.contains("mc_set_size")) c.mc_set_size = j.at("mc_set_size").get<Eigen::Index>();
    if (j.contains("seeds")) {
      const json& s = j.at("seeds");
      check_keys(s, {"function", "init", "pool"}, "seeds");
      if (s.contains("function")) c.function_seed = s.at("function").get<std::uint64_t>();
      if (s.contains("init")) c.init_seed = s.at("init").get<std::uint64_t>();
      if (s.contains("pool")) c.pool_seed = s.at("pool").get<std::uint64_t>();
    }
    if (j.contains("density_floor")) c.density_floor = j.at("density_floor").get<double>();
    if (j.contains("kde_grid_size")) c.kde_grid_size = j.at("kde_grid_size").get<int>();
    if (j.contains("hyperfit")) {
      const json& h = j.at("hyperfit");
      check_keys(h, {"restarts", "small_threshold", "interval"}, "hyperfit");
      if (h.contains("restarts")) c.hyperfit.restarts = h.at("restarts").get<int>();
      if (h.contains("small_threshold"))
        c.hyperfit.small_threshold = h.at("small_threshold").get<int>();
      if (h.contains("interval")) c.hyperfit.interval = h.at("interval").get<int>();
    }
    if (j.contains("integral_subcandidates"))
      c.integral_subcandidates = j.at("integral_subcandidates").get<int>();
    if (j.contains("divergence_cap")) c.divergence_cap = j.at("divergence_cap").get<double>();
    if (j.contains("memory_budget_bytes"))
      c.memory_budget_bytes = j.at("memory_budget_bytes").get<std::uint64_t>();
    if (j.contains("record_wall_time"))
      c.record_wall_time = j.at("record_wall_time").get<bool>();
    if (j.contains("output_path")) c.output_path = j.at("output_path").get<std::string>();
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["system"] = system;
  j["system_params"] = system_params.empty() ? json::object() : json::parse(system_params);
  j["surrogate_kernel"] = family_to_string(surrogate_kernel);
  j["n_init"] = n_init;
  j["n_seq"] = n_seq;
  j["mode"] = mode_to_json(mode);
  j["acquisition"] = {{"t", acquisition.t}, {"alpha", acquisition.alpha}};
  j["n_mc"] = n_mc;
  j["mc_set_size"] = mc_set_size;
  j["seeds"] = {{"function", function_seed}, {"init", init_seed}, {"pool", pool_seed}};
  j["density_floor"] = density_floor;
  j["kde_grid_size"] = kde_grid_size;
  j["hyperfit"] = {{"restarts", hyperfit.restarts},
                   {"small_threshold", hyperfit.small_threshold},
                   {"interval", hyperfit.interval}};
  j["integral_subcandidates"] = integral_subcandidates;
  j["divergence_cap"] = divergence_cap;
  j["memory_budget_bytes"] = memory_budget_bytes;
  j["record_wall_time"] = record_wall_time;
  j["output_path"] = output_path;
  j["cache_dir"] = cache_dir;
  return j.dump(2);
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
  json j = json::parse(to_json_text());
  // Dotted path into the mirror document.
  json* node = &j;
  std::size_t start = 0;
  std::vector<std::string> parts;
  while (true) {
    const std::size_t dot = key.find('.', start);
    parts.push_back(key.substr(start, dot == std::string::npos ? dot : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]))
      throw InvalidArgumentError("override: unknown key '" + key + "'");
    node = &node->at(parts[i]);
  }
  const std::string& leaf = parts.back();
  // system_params is an open object; everything else must already exist.
  const bool into_params = parts.size() >= 2 && parts[0] == "system_params";
  if (!into_params && !node->contains(leaf))
    throw InvalidArgumentError("override: unknown key '" + key + "'");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings stay strings
  }
  (*node)[leaf] = parsed;
  *this = from_json_text(j.dump());
}

double ErrorTrace::terminal_epsilon() const {
  if (records.empty()) return std::numeric_limits<double>::quiet_NaN();
  return records.back().epsilon;
}

void ErrorTrace::write_csv(std::ostream& os, bool include_wall_time) const {
  os << "iter,epsilon";
  for (Eigen::Index k = 0; k < dim; ++k) os << ",x" << k;
  os << ",y,acq_value,wall_s\n";
  for (const TraceRecord& r : records) {
    os << r.iteration << ',' << format_double(r.epsilon);
    for (Eigen::Index k = 0; k < dim; ++k) os << ',' << format_double(r.x[k]);
    os << ',' << format_double(r.y) << ',' << format_double(r.acq_value) << ','
       << format_double(include_wall_time ? r.wall_s : 0.0) << '\n';
  }
  if (failed) os << "# run failed: " << failure << '\n';
}

std::string ErrorTrace::to_json_text(bool include_wall_time) const {
  json j;
  j["dim"] = dim;
  j["failed"] = failed;
  if (failed) j["failure"] = failure;
  j["seeds"] = {{"function", function_seed}, {"init", init_seed}, {"pool", pool_seed}};
  j["threads"] = threads;
  json recs = json::array();
  for (const TraceRecord& r : records) {
    json rec;
    rec["iter"] = r.iteration;
    rec["epsilon"] = r.epsilon;
    std::vector<double> x(r.x.data(), r.x.data() + r.x.size());
    rec["x"] = x;
    rec["y"] = r.y;
    rec["acq_value"] = r.acq_value;
    rec["wall_s"] = include_wall_time ? r.wall_s : 0.0;
    recs.push_back(std::move(rec));
  }
  j["records"] = std::move(recs);
  return j.dump(2);
}

namespace {

struct SurrogatePdfs {
  DensityEstimate center, plus, minus;
  bool shifted_valid = false;
};

void build_center(SurrogatePdfs& pdfs, const PoolCache& mc_cache,
                  const ExperimentConfig& cfg) {
  pdfs.center = estimate_pdf(mc_cache.means(), cfg.kde_grid_size, cfg.density_floor);
  pdfs.center.generation = mc_cache.generation();
  pdfs.shifted_valid = false;
}

void build_shifted(SurrogatePdfs& pdfs, const PoolCache& mc_cache,
                   const ExperimentConfig& cfg) {
  const Eigen::ArrayXd sd = mc_cache.vars().array().max(0.0).sqrt();
  const Eigen::VectorXd up = (mc_cache.means().array() + cfg.acquisition.alpha * sd).matrix();
  const Eigen::VectorXd dn = (mc_cache.means().array() - cfg.acquisition.alpha * sd).matrix();
  pdfs.plus = estimate_pdf(up, cfg.kde_grid_size, cfg.density_floor);
  pdfs.minus = estimate_pdf(dn, cfg.kde_grid_size, cfg.density_floor);
  pdfs.plus.generation = mc_cache.generation();
  pdfs.minus.generation = mc_cache.generation();
  pdfs.shifted_valid = true;
}

}  // namespace

ErrorTrace run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t_start = Clock::now();

  BenchmarkSystem system = build_system(config.system, config.system_params,
                                        config.function_seed);
  const Eigen::Index d = system.dim;
  if (config.n_init < d + 1)
    throw InvalidArgumentError("config: n_init must be at least dim + 1");

  ErrorTrace trace;
  trace.dim = d;
  trace.function_seed = config.function_seed;
  trace.init_seed = config.init_seed;
  trace.pool_seed = config.pool_seed;

  // Budgeted evaluations go through this wrapper; divergences record the cap.
  long long evaluations = 0;
  auto evaluate = [&](const Eigen::Ref<const Eigen::VectorXd>& x) {
    ++evaluations;
    try {
      return system.response(x);
    } catch (const DivergenceError&) {
      return config.divergence_cap;
    }
  };
  auto ground_response = [&](const Eigen::Ref<const Eigen::VectorXd>& x) {
    try {
      return system.response(x);
    } catch (const DivergenceError&) {
      return config.divergence_cap;
    }
  };

  // One-time ground truth over the fixed MC set (cached on disk when asked).
  std::ostringstream cache_key;
  cache_key << system.id << '_' << std::hex << system.params_hash;
  const GroundTruth gt = ground_truth_pdf(ground_response, system.input,
                                          config.mc_set_size, config.function_seed,
                                          config.kde_grid_size, config.density_floor,
                                          config.cache_dir, cache_key.str());

  CandidatePool pool = build_pool(system.input, config.n_mc, config.pool_seed);
  Eigen::VectorXd log_px(pool.size());
  for (Eigen::Index i = 0; i < pool.size(); ++i)
    log_px[i] = system.input.log_density(pool.points.row(i).transpose());

  // Initial design: LHS through the input quantile transform.
  Rng init_rng(derive_seed(config.init_seed, 0x696e6974));
  const Eigen::MatrixXd u0 = latin_hypercube_unit(config.n_init, d, init_rng);
  Dataset data(d);
  for (Eigen::Index i = 0; i < config.n_init; ++i) {
    Eigen::VectorXd x(d);
    for (Eigen::Index k = 0; k < d; ++k) x[k] = system.input.quantile(k, u0(i, k));
    data.append(x, evaluate(x));
  }

  FitOptions fit_opts;
  fit_opts.restarts = config.hyperfit.restarts;
  fit_opts.seed = derive_seed(config.init_seed, 0x68797065);

  const Eigen::Index n_max = config.n_init + config.n_seq;
  PoolCacheOptions cache_opts;
  cache_opts.memory_budget_bytes = config.memory_budget_bytes;

  KernelConfig kernel = fit_hyperparameters(data, config.surrogate_kernel, fit_opts);
  auto state = std::make_unique<Posterior>(data, kernel);
  auto pool_cache = std::make_unique<PoolCache>(*state, pool.points, n_max, cache_opts,
                                                /*generation=*/0);
  auto mc_cache = std::make_unique<PoolCache>(*state, gt.inputs, n_max, cache_opts,
                                              /*generation=*/0);

  SurrogatePdfs pdfs;
  build_center(pdfs, *mc_cache, config);
  trace.records.push_back({0, log_pdf_error(pdfs.center, gt.pdf),
                           Eigen::VectorXd::Constant(d, std::nan("")), std::nan(""),
                           std::nan(""), elapsed(t_start)});

  Rng subcand_rng(derive_seed(config.pool_seed, 0x73756263));
  int iters_since_fit = 0;

  auto rebuild = [&](Dataset rebuilt_data, std::int64_t generation) {
    state = std::make_unique<Posterior>(std::move(rebuilt_data), kernel);
    pool_cache = std::make_unique<PoolCache>(*state, pool.points, n_max, cache_opts,
                                             generation);
    mc_cache = std::make_unique<PoolCache>(*state, gt.inputs, n_max, cache_opts, generation);
  };

  for (int iter = 1; iter <= config.n_seq; ++iter) {
    const auto t_iter = Clock::now();
    try {
      // Hyperparameter schedule: every iteration while the dataset is small,
      // then on a fixed cadence. A changed kernel invalidates both caches.
      ++iters_since_fit;
      if (state->size() < config.hyperfit.small_threshold ||
          iters_since_fit >= config.hyperfit.interval) {
        iters_since_fit = 0;
        const KernelConfig refit =
            fit_hyperparameters(state->data(), config.surrogate_kernel, fit_opts);
        if (!refit.approx_equal(kernel)) {
          kernel = refit;
          rebuild(state->data(), pool_cache->generation() + 1);
        }
      }
      if (pdfs.center.generation != mc_cache->generation()) build_center(pdfs, *mc_cache, config);

      const double dup_floor = kDuplicateVarFloorRel * state->prior_variance();
      Selection sel;
      double acq_value = 0.0;
      if (config.mode == AcquisitionMode::LwIntegral) {
        // Criterion mode: argmin over a random sub-candidate set; each
        // candidate costs O(n_mc * n).
        const Eigen::Index want =
            std::min<Eigen::Index>(config.integral_subcandidates, pool.size());
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index best_idx = -1;
        Eigen::Index considered = 0, probe = 0;
        std::vector<Eigen::Index> order(pool.size());
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        subcand_rng.shuffle(order);
        while (considered < want && probe < pool.size()) {
          const Eigen::Index idx = order[probe++];
          if (pool_cache->vars()[idx] < dup_floor) continue;
          ++considered;
          const double crit = integral_lw_criterion(pool.points.row(idx).transpose(),
                                                    *pool_cache, *state, log_px, pdfs.center);
          if (crit < best || (crit == best && idx < best_idx)) {
            best = crit;
            best_idx = idx;
          }
        }
        if (best_idx < 0)
          throw PoolExhaustedError("run_experiment: all integral candidates masked");
        sel = {best_idx, pool.points.row(best_idx).transpose()};
        acq_value = best;
      } else {
        Eigen::VectorXd scores;
        if (config.mode == AcquisitionMode::LwPointwise) {
          scores = lw_scores(*pool_cache, log_px, pdfs.center);
        } else {
          if (config.acquisition.alpha == 0.0) {
            scores = glw_scores(*pool_cache, log_px, pdfs.center, pdfs.center, pdfs.center,
                                config.acquisition);
          } else {
            if (!pdfs.shifted_valid || pdfs.plus.generation != mc_cache->generation())
              build_shifted(pdfs, *mc_cache, config);
            scores = glw_scores(*pool_cache, log_px, pdfs.center, pdfs.plus, pdfs.minus,
                                config.acquisition);
          }
        }
        sel = select_next(pool, *pool_cache, scores, dup_floor);
        acq_value = scores[sel.index];
      }

      const double y = evaluate(sel.x);
      try {
        PoolCache* caches[] = {pool_cache.get(), mc_cache.get()};
        recursive_append(*state, caches, sel.x, y);
      } catch (const NumericalDegradationError&) {
        Dataset extended = state->data();
        extended.append(sel.x, y);
        rebuild(std::move(extended), pool_cache->generation() + 1);
      }
      if (pool_cache->data_size() != state->size() || mc_cache->data_size() != state->size())
        throw Error("run_experiment: cache column count out of sync");

      build_center(pdfs, *mc_cache, config);
      trace.records.push_back({iter, log_pdf_error(pdfs.center, gt.pdf), sel.x, y, acq_value,
                               elapsed(t_iter)});
    } catch (const PoolExhaustedError& e) {
      trace.failed = true;
      trace.failure = e.what();
      break;
    } catch (const Error& e) {
      trace.failed = true;
      trace.failure = e.what();
      break;
    }
  }

  if (!trace.failed &&
      evaluations != static_cast<long long>(config.n_init) + config.n_seq)
    throw Error("run_experiment: evaluation budget violated");
  return trace;
}

namespace {

void aggregate(EnsembleResult& result) {
  std::size_t longest = 0;
  for (const ErrorTrace& t : result.traces)
    if (!t.failed) longest = std::max(longest, t.records.size());
  result.mean_epsilon.assign(longest, 0.0);
  result.median_epsilon.assign(longest, 0.0);
  result.mean_log10_epsilon.assign(longest, 0.0);
  result.counts.assign(longest, 0);
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<double> eps;
    for (const ErrorTrace& t : result.traces)
      if (!t.failed && i < t.records.size()) eps.push_back(t.records[i].epsilon);
    result.counts[i] = static_cast<int>(eps.size());
    if (eps.empty()) continue;
    double sum = 0.0, sum_log = 0.0;
    for (double e : eps) {
      sum += e;
      sum_log += std::log10(std::max(e, 1e-300));
    }
    result.mean_epsilon[i] = sum / static_cast<double>(eps.size());
    result.mean_log10_epsilon[i] = sum_log / static_cast<double>(eps.size());
    std::sort(eps.begin(), eps.end());
    const std::size_t m = eps.size() / 2;
    result.median_epsilon[i] = eps.size() % 2 ? eps[m] : 0.5 * (eps[m - 1] + eps[m]);
  }
}

}  // namespace

double EnsembleResult::terminal_mean_log10() const {
  if (mean_log10_epsilon.empty()) return std::numeric_limits<double>::quiet_NaN();
  return mean_log10_epsilon.back();
}

double EnsembleResult::terminal_median() const {
  if (median_epsilon.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median_epsilon.back();
}

void EnsembleResult::write_csv(std::ostream& os) const {
  os << "iter,mean_epsilon,median_epsilon,mean_log10_epsilon,runs\n";
  for (std::size_t i = 0; i < mean_epsilon.size(); ++i)
    os << i << ',' << format_double(mean_epsilon[i]) << ',' << format_double(median_epsilon[i])
       << ',' << format_double(mean_log10_epsilon[i]) << ',' << counts[i] << '\n';
}

EnsembleResult run_ensemble(const ExperimentConfig& base,
                            const std::vector<std::uint64_t>& function_seeds,
                            const std::vector<std::uint64_t>& init_seeds, int threads) {
  if (function_seeds.empty() || init_seeds.empty())
    throw InvalidArgumentError("run_ensemble: empty seed lists");
  std::vector<ExperimentConfig> configs;
  configs.reserve(function_seeds.size() * init_seeds.size());
  for (std::uint64_t fs : function_seeds)
    for (std::uint64_t is : init_seeds) {
      ExperimentConfig c = base;
      c.function_seed = fs;
      c.init_seed = is;
      c.output_path.clear();
      configs.push_back(std::move(c));
    }

  EnsembleResult result;
  result.traces.resize(configs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        result.traces[i] = run_experiment(configs[i]);
      } catch (const std::exception& e) {
        result.traces[i].failed = true;
        result.traces[i].failure = e.what();
      }
      if (result.traces[i].failed) failures.fetch_add(1);
    }
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(configs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> team;
    team.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) team.emplace_back(worker);
    for (std::thread& t : team) t.join();
  }
  result.failures = failures.load();
  aggregate(result);
  return result;
}

void SweepResult::write_csv(std::ostream& os) const {
  os << "t_by_alpha";
  for (double a : alpha_values) os << ',' << format_double(a);
  os << '\n';
  for (std::size_t r = 0; r < t_values.size(); ++r) {
    os << format_double(t_values[r]);
    for (std::size_t c = 0; c < alpha_values.size(); ++c)
      os << ',' << format_double(mean_log10_terminal(static_cast<Eigen::Index>(r),
                                                     static_cast<Eigen::Index>(c)));
    os << '\n';
  }
}

SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& t_values,
                  const std::vector<double>& alpha_values,
                  const std::vector<std::uint64_t>& function_seeds,
                  const std::vector<std::uint64_t>& init_seeds, int threads) {
  if (t_values.empty() || alpha_values.empty())
    throw InvalidArgumentError("sweep: empty parameter grids");
  SweepResult out;
  out.t_values = t_values;
  out.alpha_values = alpha_values;
  out.mean_log10_terminal.resize(static_cast<Eigen::Index>(t_values.size()),
                                 static_cast<Eigen::Index>(alpha_values.size()));
  for (std::size_t r = 0; r < t_values.size(); ++r)
    for (std::size_t c = 0; c < alpha_values.size(); ++c) {
      ExperimentConfig cell = base;
      cell.acquisition.t = t_values[r];
      cell.acquisition.alpha = alpha_values[c];
      const EnsembleResult res = run_ensemble(cell, function_seeds, init_seeds, threads);
      out.mean_log10_terminal(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          res.terminal_mean_log10();
    }
  return out;
}

}  // namespace glws
