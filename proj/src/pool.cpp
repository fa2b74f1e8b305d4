#include "glws/pool.hpp"

#include <numeric>
#include <vector>

#include "glws/errors.hpp"

namespace glws {

Eigen::MatrixXd latin_hypercube_unit(Eigen::Index n, Eigen::Index d, Rng& rng) {
  if (n < 1 || d < 1) throw InvalidArgumentError("latin_hypercube_unit: empty design");
  Eigen::MatrixXd u(n, d);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    rng.shuffle(perm);
    for (Eigen::Index i = 0; i < n; ++i)
      u(i, k) = (static_cast<double>(perm[i]) + rng.uniform01()) / static_cast<double>(n);
  }
  return u;
}

CandidatePool build_pool(const InputDistribution& dist, Eigen::Index n_mc,
                         std::uint64_t seed) {
  if (n_mc < 1) throw InvalidArgumentError("build_pool: n_mc must be positive");
  Rng rng(derive_seed(seed, 0x706f6f6c));
  const Eigen::Index d = dist.dim();
  Eigen::MatrixXd u = latin_hypercube_unit(n_mc, d, rng);
  CandidatePool pool;
  pool.seed = seed;
  pool.points.resize(n_mc, d);
  for (Eigen::Index i = 0; i < n_mc; ++i)
    for (Eigen::Index k = 0; k < d; ++k) pool.points(i, k) = dist.quantile(k, u(i, k));
  return pool;
}

Selection select_next(const CandidatePool& pool, const PoolCache& cache,
                      const Eigen::Ref<const Eigen::VectorXd>& scores,
                      double duplicate_var_floor) {
  if (scores.size() != pool.size() || cache.pool_size() != pool.size())
    throw InvalidArgumentError("select_next: size mismatch");
  Eigen::Index best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd& vars = cache.vars();
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (vars[i] < duplicate_var_floor) continue;
    if (scores[i] > best_score) {
      best_score = scores[i];
      best = i;
    }
  }
  if (best < 0)
    throw PoolExhaustedError("select_next: every candidate is below the duplicate floor");
  return {best, pool.points.row(best).transpose()};
}

}  // namespace glws
