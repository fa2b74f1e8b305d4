#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "glws/dataset.hpp"
#include "glws/kernel.hpp"

namespace glws {

struct PosteriorOptions {
  double jitter_rel = 1e-10;      // initial jitter as a fraction of tau^2
  double jitter_rel_max = 1e-4;   // escalation cap (x10 steps)
};

/// Candidates whose predictive variance falls below this fraction of tau^2
/// are considered interpolated and masked from selection.
constexpr double kDuplicateVarFloorRel = 1e-8;

/// Hard floor for appending: below this the covariance extension is
/// numerically rank-deficient.
constexpr double kAppendVarFloorRel = 1e-12;

/// Negative predictive variances above this fraction of -tau^2 clamp to
/// zero; anything lower signals accumulated cancellation.
constexpr double kVarDegradationRel = 1e-8;

/// Noise-free GPR posterior backed by a Cholesky factor of
/// K(X, X) + jitter * I. Immutable from the caller's perspective except via
/// append(), which extends the factor by one row in O(n^2).
class Posterior {
 public:
  Posterior(Dataset data, KernelConfig kernel, PosteriorOptions opts = {});

  const Dataset& data() const { return data_; }
  const KernelConfig& kernel() const { return kernel_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return data_.size(); }
  Eigen::Index dim() const { return data_.dim(); }
  double prior_variance() const { return kernel_.amplitude * kernel_.amplitude; }

  /// Posterior mean and variance at each query row. Variances are clamped to
  /// [0, tau^2 + jitter].
  void predict(const Eigen::Ref<const Eigen::MatrixXd>& queries, Eigen::VectorXd& means,
               Eigen::VectorXd& vars) const;
  std::pair<double, double> predict_one(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Extends the factorization and alpha vector with one observation.
  void append(const Eigen::Ref<const Eigen::VectorXd>& x, double y);

  /// L^{-1} v and (K + jitter I)^{-1} v through the stored factor.
  Eigen::VectorXd solve_lower(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  Eigen::Block<const Eigen::MatrixXd> chol_lower() const {
    return chol_.topLeftCorner(n_, n_);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> alpha() const { return alpha_.head(n_); }

 private:
  void factorize();
  void reserve(Eigen::Index capacity);

  Dataset data_;
  KernelConfig kernel_;
  PosteriorOptions opts_;
  double jitter_ = 0.0;
  Eigen::Index n_ = 0;
  Eigen::MatrixXd chol_;   // capacity x capacity, lower triangle in top-left n x n
  Eigen::VectorXd alpha_;  // capacity
};

struct PoolCacheOptions {
  std::uint64_t memory_budget_bytes = 2ull << 30;
};

/// Cached cross-covariance K(pool, X) plus pool means/variances, refreshed in
/// O(n_pool * n) per new sample. The memory-time tradeoff: the cross block is
/// preallocated for max_data_size columns and checked against a budget.
class PoolCache {
 public:
  PoolCache(const Posterior& state, Eigen::MatrixXd points, Eigen::Index max_data_size,
            PoolCacheOptions opts = {}, std::int64_t generation = 0);

  Eigen::Index pool_size() const { return points_.rows(); }
  Eigen::Index data_size() const { return cols_; }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::VectorXd& vars() const { return vars_; }
  Eigen::Block<const Eigen::MatrixXd> cross_cov() const {
    return cross_.topLeftCorner(points_.rows(), cols_);
  }
  std::int64_t generation() const { return generation_; }

  friend void recursive_append(Posterior& state, std::span<PoolCache* const> caches,
                               const Eigen::Ref<const Eigen::VectorXd>& x, double y);

 private:
  Eigen::MatrixXd points_;  // n_pool x d
  Eigen::MatrixXd cross_;   // n_pool x max_data_size
  Eigen::VectorXd means_, vars_;
  Eigen::Index cols_ = 0;
  std::int64_t generation_ = 0;
};

/// One-step recursive refresh: extends the posterior with (x, y) and updates
/// every cache's means/variances from the rank-one posterior identity,
/// computing K^{-1} k(X, x) once as an n-vector and multiplying by the cached
/// cross-covariance (never a pool-sized triangular solve). Throws without
/// mutating anything on a duplicate point or on variance degradation.
void recursive_append(Posterior& state, std::span<PoolCache* const> caches,
                      const Eigen::Ref<const Eigen::VectorXd>& x, double y);

inline void recursive_append(PoolCache& cache, Posterior& state,
                             const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  PoolCache* caches[] = {&cache};
  recursive_append(state, caches, x, y);
}

}  // namespace glws
