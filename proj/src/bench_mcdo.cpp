#include "glws/bench_mcdo.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "glws/errors.hpp"
#include "glws/io.hpp"
#include "glws/rng.hpp"

namespace glws {

namespace {

using Clock = std::chrono::steady_clock;

struct Fixture {
  Dataset data;
  KernelConfig kernel;
  Eigen::MatrixXd pool;
  Eigen::VectorXd x_new;
  double y_new;
};

// Training points on a jittered grid with the lengthscale tied to the grid
// spacing: the covariance conditioning then stays flat as n grows, so the
// equivalence gate is meaningful at every size (random point sets develop
// near-duplicate rows and the comparison drowns in roundoff).
Fixture make_fixture(Eigen::Index n_mc, Eigen::Index n, Rng& rng) {
  const Eigen::Index d = 2;
  const Eigen::Index g =
      static_cast<Eigen::Index>(std::ceil(std::sqrt(static_cast<double>(n + 1))));
  const double spacing = 12.0 / static_cast<double>(g);
  Eigen::MatrixXd x(n + 1, d);
  Eigen::VectorXd y(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const Eigen::Index cell[2] = {i / g, i % g};
    for (Eigen::Index k = 0; k < d; ++k)
      x(i, k) = -6.0 + spacing * (static_cast<double>(cell[k]) + 0.2 + 0.6 * rng.uniform01());
    y[i] = std::sin(x(i, 0)) + 0.5 * std::cos(2.0 * x(i, 1));
  }
  Eigen::MatrixXd pool(n_mc, d);
  for (Eigen::Index i = 0; i < n_mc; ++i)
    for (Eigen::Index k = 0; k < d; ++k) pool(i, k) = 12.0 * rng.uniform01() - 6.0;
  KernelConfig kernel = KernelConfig::rbf(2.0, Eigen::VectorXd::Constant(d, 1.2 * spacing));
  return {Dataset(x.topRows(n), y.head(n)), kernel, std::move(pool),
          x.row(n).transpose(), y[n]};
}

// (a) Brute force: rebuild the posterior on D+1 points, then batch-predict
// the whole pool (dense cross-covariance, pool-sized triangular solve).
void brute_path(const Fixture& fx, Eigen::VectorXd& means, Eigen::VectorXd& vars) {
  Dataset extended = fx.data;
  extended.append(fx.x_new, fx.y_new);
  Posterior state(std::move(extended), fx.kernel);
  state.predict(fx.pool, means, vars);
}

// (b) Naive recursive: keep the cached prediction and cross-covariance, but
// obtain the posterior covariance column as (K(pool,X) K^{-1}) k — an
// n_mc x n triangular solve each call.
void naive_recursive_path(const Fixture& fx, const Posterior& state, const PoolCache& cache,
                          Eigen::VectorXd& means, Eigen::VectorXd& vars) {
  const double tau2 = state.prior_variance();
  const Eigen::VectorXd k = kernel_column(state.kernel(), state.data().inputs(), fx.x_new);
  Eigen::MatrixXd w = cache.cross_cov().transpose();  // n x n_mc
  state.chol_lower().triangularView<Eigen::Lower>().solveInPlace(w);
  state.chol_lower().transpose().triangularView<Eigen::Upper>().solveInPlace(w);
  const Eigen::VectorXd cov =
      kernel_column(state.kernel(), cache.points(), fx.x_new) - w.transpose() * k;
  const Eigen::VectorXd b = state.solve_lower(k);
  const double schur = tau2 + state.jitter() - b.squaredNorm();
  const double resid = fx.y_new - k.dot(state.alpha());
  means = cache.means() + cov * (resid / schur);
  vars = (cache.vars().array() - cov.array().square() / schur).max(0.0).matrix();
}

// (c) Regrouped recursive: solve the n-vector K^{-1} k first, multiply by the
// cached cross-covariance, and extend everything in place.
void regrouped_path(const Fixture& fx, Posterior& state, PoolCache& cache) {
  recursive_append(cache, state, fx.x_new, fx.y_new);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void check_equivalence(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol,
                       const char* what) {
  const double denom = std::max(a.lpNorm<Eigen::Infinity>(), 1e-12);
  const double err = (a - b).lpNorm<Eigen::Infinity>() / denom;
  if (err > tol)
    throw Error(std::string("benchmark_update_paths: paths disagree on ") + what);
}

}  // namespace

double BenchResult::loglog_slope(const std::string& path) const {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const BenchRow& r : rows) {
    if (r.path != path) continue;
    const double lx = std::log(static_cast<double>(r.n));
    const double ly = std::log(r.median_seconds);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) throw InvalidArgumentError("loglog_slope: need at least two sizes");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

double BenchResult::time_at(const std::string& path, Eigen::Index n) const {
  for (const BenchRow& r : rows)
    if (r.path == path && r.n == n) return r.median_seconds;
  throw InvalidArgumentError("time_at: no such row");
}

void BenchResult::write_csv(std::ostream& os) const {
  os << "n,path,median_seconds,threads\n";
  for (const BenchRow& r : rows)
    os << r.n << ',' << r.path << ',' << format_double(r.median_seconds) << ',' << r.threads
       << '\n';
}

BenchResult benchmark_update_paths(Eigen::Index n_mc,
                                   const std::vector<Eigen::Index>& n_values,
                                   const BenchOptions& opts) {
  if (n_mc < 1 || n_values.empty())
    throw InvalidArgumentError("benchmark_update_paths: empty configuration");
  BenchResult result;
  Rng rng(derive_seed(opts.seed, 0x6d63646f));
  for (const Eigen::Index n : n_values) {
    const Fixture fx = make_fixture(n_mc, n, rng);

    PoolCacheOptions cache_opts;
    cache_opts.memory_budget_bytes = 8ull << 30;
    // One baseline per n; the recursive paths read it (naive) or mutate a
    // copy (regrouped), so the expensive cache init stays out of the timings.
    Posterior base_state(fx.data, fx.kernel);
    PoolCache base_cache(base_state, fx.pool, n + 1, cache_opts);

    // Equivalence gate before any timing.
    {
      Eigen::VectorXd mean_a, var_a, mean_b, var_b;
      brute_path(fx, mean_a, var_a);
      naive_recursive_path(fx, base_state, base_cache, mean_b, var_b);
      check_equivalence(mean_a, mean_b, opts.equivalence_tol, "means (naive)");
      check_equivalence(var_a, var_b, opts.equivalence_tol, "vars (naive)");
      Posterior state = base_state;
      PoolCache cache = base_cache;
      regrouped_path(fx, state, cache);
      check_equivalence(mean_a, cache.means(), opts.equivalence_tol, "means (regrouped)");
      check_equivalence(var_a, cache.vars(), opts.equivalence_tol, "vars (regrouped)");
    }

    const int reps = std::max(1, opts.repeats);
    std::vector<double> t_brute, t_naive, t_regroup;
    for (int r = 0; r <= reps; ++r) {  // first pass is the warm-up
      Eigen::VectorXd means, vars;
      auto tic = Clock::now();
      brute_path(fx, means, vars);
      double dt = std::chrono::duration<double>(Clock::now() - tic).count();
      if (r > 0) t_brute.push_back(dt);

      tic = Clock::now();
      naive_recursive_path(fx, base_state, base_cache, means, vars);
      dt = std::chrono::duration<double>(Clock::now() - tic).count();
      if (r > 0) t_naive.push_back(dt);

      Posterior state_r = base_state;
      PoolCache cache_r = base_cache;
      tic = Clock::now();
      regrouped_path(fx, state_r, cache_r);
      dt = std::chrono::duration<double>(Clock::now() - tic).count();
      if (r > 0) t_regroup.push_back(dt);
    }
    result.rows.push_back({n, "brute", median(t_brute), opts.threads});
    result.rows.push_back({n, "naive-recursive", median(t_naive), opts.threads});
    result.rows.push_back({n, "regrouped", median(t_regroup), opts.threads});
  }
  return result;
}

}  // namespace glws
