#include <doctest.h>

#include <cmath>

#include "glws/errors.hpp"
#include "glws/gp.hpp"
#include "glws/rng.hpp"

using namespace glws;

namespace {

// Independent dense oracle for the posterior equations: builds the full
// covariance, inverts it directly, and evaluates mean/variance per query.
void dense_oracle(const Dataset& data, const KernelConfig& kernel, double jitter,
                  const Eigen::MatrixXd& queries, Eigen::VectorXd& means,
                  Eigen::VectorXd& vars) {
  const Eigen::Index m = queries.rows();
  means.resize(m);
  vars.resize(m);
  Eigen::MatrixXd k = kernel_matrix(kernel, data.inputs(), data.inputs());
  k.diagonal().array() += jitter;
  const Eigen::MatrixXd kinv = k.inverse();
  for (Eigen::Index q = 0; q < m; ++q) {
    const Eigen::VectorXd kq = kernel_column(kernel, data.inputs(), queries.row(q).transpose());
    means[q] = kq.dot(kinv * data.responses());
    vars[q] = kernel.amplitude * kernel.amplitude - kq.dot(kinv * kq);
  }
}

Dataset random_dataset(Eigen::Index n, Eigen::Index d, Rng& rng, double spread = 6.0) {
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = spread * (2.0 * rng.uniform01() - 1.0);
    y[i] = std::sin(x(i, 0)) + 0.3 * x.row(i).squaredNorm();
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace

TEST_CASE("empty dataset: prior mean zero, prior variance everywhere") {
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(Dataset(2), k);
  Eigen::MatrixXd q(3, 2);
  q << 0, 0, 1, -1, 4, 4;
  Eigen::VectorXd means, vars;
  state.predict(q, means, vars);
  CHECK(means.lpNorm<Eigen::Infinity>() == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(vars[i] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("single observation interpolates") {
  const KernelConfig k = KernelConfig::rbf(1.5, Eigen::VectorXd::Ones(1));
  Eigen::MatrixXd x(1, 1);
  x << 0.7;
  Eigen::VectorXd y(1);
  y << 3.0;
  Posterior state(Dataset(x, y), k);
  const auto [mean, var] = state.predict_one(x.row(0).transpose());
  CHECK(mean == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(var >= 0.0);
  CHECK(var <= 10.0 * state.jitter());
}

TEST_CASE("noise-free posterior interpolates 50 random points") {
  Rng rng(91);
  const Dataset data = random_dataset(50, 2, rng);
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(data, k);
  Eigen::VectorXd means, vars;
  state.predict(data.inputs(), means, vars);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    CHECK(std::abs(means[i] - data.responses()[i]) < 1e-5);
    CHECK(vars[i] <= 10.0 * state.jitter());
  }
}

TEST_CASE("chol factor reconstructs the jittered covariance") {
  Rng rng(7);
  const Dataset data = random_dataset(30, 2, rng);
  const KernelConfig k = KernelConfig::matern(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(data, k);
  Eigen::MatrixXd gram = kernel_matrix(k, data.inputs(), data.inputs());
  gram.diagonal().array() += state.jitter();
  const Eigen::MatrixXd l = state.chol_lower();
  CHECK((l * l.transpose() - gram).norm() / gram.norm() < 1e-8);
  // alpha solves the jittered system
  const Eigen::VectorXd resid = gram * state.alpha() - data.responses();
  CHECK(resid.norm() / data.responses().norm() < 1e-8);
}

TEST_CASE("predict matches the dense oracle") {
  Rng rng(19);
  const Dataset data = random_dataset(5, 2, rng);
  const KernelConfig k = KernelConfig::rbf(1.7, Eigen::VectorXd::Constant(2, 1.2));
  Posterior state(data, k);
  Eigen::MatrixXd queries(3, 2);
  queries << 0.5, 0.5, -2, 1, 3, -3;
  Eigen::VectorXd means, vars, o_means, o_vars;
  state.predict(queries, means, vars);
  dense_oracle(data, k, state.jitter(), queries, o_means, o_vars);
  for (int i = 0; i < 3; ++i) {
    CHECK(means[i] == doctest::Approx(o_means[i]).epsilon(1e-10));
    CHECK(vars[i] == doctest::Approx(o_vars[i]).epsilon(1e-10));
  }
}

TEST_CASE("far queries revert to the prior") {
  Rng rng(3);
  const Dataset data = random_dataset(20, 2, rng, 1.0);
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(data, k);
  const auto [mean, var] = state.predict_one(Eigen::Vector2d(25.0, 25.0));
  CHECK(std::abs(mean) < 1e-4);
  CHECK(var == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("predict rejects non-finite queries") {
  const KernelConfig k = KernelConfig::rbf(1.0, Eigen::VectorXd::Ones(2));
  Posterior state(Dataset(2), k);
  Eigen::MatrixXd q(1, 2);
  q << std::nan(""), 0.0;
  Eigen::VectorXd means, vars;
  CHECK_THROWS_AS(state.predict(q, means, vars), InvalidArgumentError);
}

TEST_CASE("pool cache equals batch prediction bitwise at initialization") {
  Rng rng(40);
  const Dataset data = random_dataset(20, 2, rng);
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(data, k);
  Eigen::MatrixXd pool(1000, 2);
  for (int i = 0; i < 1000; ++i) pool.row(i) << 6 * rng.normal(), 6 * rng.normal();
  PoolCache cache(state, pool, 40);
  Eigen::VectorXd means, vars;
  state.predict(pool, means, vars);
  CHECK((cache.means() - means).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((cache.vars() - vars).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(cache.cross_cov().cols() == 20);
}

TEST_CASE("pool cache on an empty posterior holds the prior") {
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(Dataset(2), k);
  Eigen::MatrixXd pool = Eigen::MatrixXd::Random(1000, 2);
  PoolCache cache(state, pool, 10);
  CHECK(cache.means().lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((cache.vars().array() == 4.0).all());
}

TEST_CASE("pool cache memory budget is enforced") {
  const KernelConfig k = KernelConfig::rbf(1.0, Eigen::VectorXd::Ones(2));
  Posterior state(Dataset(2), k);
  Eigen::MatrixXd pool = Eigen::MatrixXd::Random(200000, 2);
  PoolCacheOptions opts;
  opts.memory_budget_bytes = 1 << 20;  // 1 MB; 8 * 2e5 * 1000 far exceeds it
  CHECK_THROWS_AS(PoolCache(state, pool, 1000, opts), BudgetError);
}

TEST_CASE("recursive append equals a fresh rebuild (central equivalence)") {
  Rng rng(55);
  Eigen::MatrixXd pool(2000, 2);
  for (int i = 0; i < 2000; ++i) pool.row(i) << 6 * rng.normal(), 6 * rng.normal();
  for (const KernelFamily family : {KernelFamily::RBF, KernelFamily::Matern}) {
    KernelConfig k;
    k.family = family;
    k.amplitude = 2.0;
    k.lengthscales = Eigen::VectorXd::Constant(2, 1.0 + rng.uniform01());
    Dataset data = random_dataset(4, 2, rng);
    Posterior state(data, k);
    PoolCache cache(state, pool, 40);
    for (int step = 0; step < 25; ++step) {
      Eigen::Vector2d x(6 * rng.normal(), 6 * rng.normal());
      const double y = std::cos(x[0]) * x[1];
      recursive_append(cache, state, x, y);
      data.append(x, y);
      Posterior fresh(data, k);
      Eigen::VectorXd means, vars;
      fresh.predict(pool, means, vars);
      const double mean_scale = means.lpNorm<Eigen::Infinity>();
      const double err_m = (cache.means() - means).lpNorm<Eigen::Infinity>();
      const double err_v = (cache.vars() - vars).lpNorm<Eigen::Infinity>();
      CHECK(err_m <= 1e-8 * std::max(mean_scale, 1e-2));
      CHECK(err_v <= 1e-8 * 4.0);
    }
    CHECK(cache.data_size() == state.size());
  }
}

TEST_CASE("append from the prior matches the rank-one formula") {
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Posterior state(Dataset(2), k);
  Eigen::MatrixXd pool(50, 2);
  Rng rng(17);
  for (int i = 0; i < 50; ++i) pool.row(i) << 3 * rng.normal(), 3 * rng.normal();
  PoolCache cache(state, pool, 8);
  const Eigen::Vector2d x_new(0.5, -0.25);
  const double y_new = 1.7;
  recursive_append(cache, state, x_new, y_new);
  for (int i = 0; i < 50; ++i) {
    const double kxn = kernel_eval(k, pool.row(i).transpose(), x_new);
    const double expected = kxn / kernel_eval(k, x_new, x_new) * y_new;
    CHECK(cache.means()[i] == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("appended point's own pool variance collapses") {
  Rng rng(77);
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Eigen::MatrixXd pool(100, 2);
  for (int i = 0; i < 100; ++i) pool.row(i) << 3 * rng.normal(), 3 * rng.normal();
  Posterior state(random_dataset(5, 2, rng), k);
  PoolCache cache(state, pool, 10);
  const Eigen::Vector2d x_new = pool.row(42).transpose();
  recursive_append(cache, state, x_new, 0.3);
  CHECK(cache.vars()[42] <= 10.0 * state.jitter());
}

TEST_CASE("property: appending never increases pool variance") {
  Rng rng(101);
  const KernelConfig k = KernelConfig::matern(2.0, Eigen::VectorXd::Ones(2));
  Eigen::MatrixXd pool(500, 2);
  for (int i = 0; i < 500; ++i) pool.row(i) << 6 * rng.normal(), 6 * rng.normal();
  Posterior state(random_dataset(3, 2, rng), k);
  PoolCache cache(state, pool, 40);
  for (int step = 0; step < 30; ++step) {
    const Eigen::VectorXd before = cache.vars();
    Eigen::Vector2d x(6 * rng.normal(), 6 * rng.normal());
    recursive_append(cache, state, x, rng.normal());
    CHECK((cache.vars().array() <= before.array() + 1e-10).all());
  }
}

TEST_CASE("appending an interpolated point raises a duplicate error") {
  Rng rng(5);
  const KernelConfig k = KernelConfig::rbf(2.0, Eigen::VectorXd::Ones(2));
  Dataset data = random_dataset(6, 2, rng);
  const Eigen::Vector2d existing = data.inputs().row(2).transpose();
  Posterior state(data, k);
  Eigen::MatrixXd pool = Eigen::MatrixXd::Random(50, 2);
  PoolCache cache(state, pool, 10);
  CHECK_THROWS_AS(recursive_append(cache, state, existing, 1.0), DuplicatePointError);
}

TEST_CASE("near-duplicate training rows raise a singular-covariance error") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 1e-13, 0, 2, 2;
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  const KernelConfig k = KernelConfig::rbf(1.0, Eigen::VectorXd::Ones(2));
  try {
    Posterior state(Dataset(x, y), k);
    // Jitter escalation may succeed; if so the posterior must still be usable.
    Eigen::VectorXd means, vars;
    state.predict(x, means, vars);
    CHECK(means.allFinite());
  } catch (const SingularCovarianceError& e) {
    const bool names_pair = (e.row_a == 0 && e.row_b == 1) || (e.row_a == 1 && e.row_b == 0);
    CHECK(names_pair);
  }
}

TEST_CASE("variance stays within [0, tau^2 + jitter] under stress") {
  Rng rng(202);
  const KernelConfig k = KernelConfig::rbf(3.0, Eigen::VectorXd::Constant(2, 0.4));
  Posterior state(random_dataset(60, 2, rng), k);
  Eigen::MatrixXd q(200, 2);
  for (int i = 0; i < 200; ++i) q.row(i) << 6 * rng.normal(), 6 * rng.normal();
  Eigen::VectorXd means, vars;
  state.predict(q, means, vars);
  CHECK(vars.minCoeff() >= 0.0);
  CHECK(vars.maxCoeff() <= 9.0 + state.jitter());
}
