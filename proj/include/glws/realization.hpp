#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "glws/kernel.hpp"

namespace glws {

struct Box {
  Eigen::VectorXd lo, hi;
  Eigen::Index dim() const { return lo.size(); }
  static Box cube(Eigen::Index d, double half_width) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(d, -half_width);
    b.hi = Eigen::VectorXd::Constant(d, half_width);
    return b;
  }
};

/// A Gaussian-process draw materialized on a tensor grid, evaluated anywhere
/// through multilinear interpolation (clamped to the box). Deterministic for
/// a fixed seed, cheap enough to serve as a ground-truth response.
class GridRealization {
 public:
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const Box& domain() const { return box_; }
  Eigen::Index dim() const { return box_.dim(); }
  int grid_per_dim() const { return grid_per_dim_; }
  const Eigen::VectorXd& node_values() const { return values_; }
  /// Coordinate of grid node i along a dimension.
  double axis_coord(Eigen::Index dim, Eigen::Index i) const { return axes_[dim][i]; }
  /// Value at a grid node given per-dimension indices.
  double value_at_node(const std::vector<Eigen::Index>& idx) const;

 private:
  Box box_;
  std::vector<Eigen::VectorXd> axes_;
  Eigen::VectorXd values_;  // row-major, last dimension fastest
  int grid_per_dim_ = 0;

  friend GridRealization sample_prior_realization(const KernelConfig&, const Box&, int,
                                                  std::uint64_t, struct RealizationOptions);
};

struct RealizationOptions {
  // Cap on the dense grid covariance (bytes). Separable RBF kernels bypass
  // it through per-dimension factors.
  std::uint64_t memory_budget_bytes = 1ull << 30;
  double jitter_rel = 1e-10;
  double jitter_rel_max = 1e-4;
};

GridRealization sample_prior_realization(const KernelConfig& kernel, const Box& domain,
                                         int grid_per_dim, std::uint64_t seed,
                                         RealizationOptions opts = {});

}  // namespace glws
