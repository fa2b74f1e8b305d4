#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "glws/distributions.hpp"
#include "glws/gp.hpp"
#include "glws/rng.hpp"

namespace glws {

/// Fixed space-filling candidate set over which acquisitions are discretely
/// maximized. Kept for a whole run so the cross-covariance cache can persist.
struct CandidatePool {
  Eigen::MatrixXd points;  // n_mc x d
  std::uint64_t seed = 0;
  std::int64_t generation = 0;
  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

/// Latin-hypercube design on the unit cube: each marginal hits every one of
/// the n equal strata exactly once.
Eigen::MatrixXd latin_hypercube_unit(Eigen::Index n, Eigen::Index d, Rng& rng);

/// LHS mapped through the per-dimension quantile transform of dist.
CandidatePool build_pool(const InputDistribution& dist, Eigen::Index n_mc,
                         std::uint64_t seed);

struct Selection {
  Eigen::Index index = -1;
  Eigen::VectorXd x;
};

/// Lowest-index argmax of the scores, skipping candidates whose pool
/// variance is below the duplicate floor. Throws PoolExhaustedError when
/// every candidate is masked.
Selection select_next(const CandidatePool& pool, const PoolCache& cache,
                      const Eigen::Ref<const Eigen::VectorXd>& scores,
                      double duplicate_var_floor);

}  // namespace glws
