#pragma once

#include <Eigen/Dense>

namespace glws {

enum class KernelFamily { RBF, Matern };

/// Stationary covariance function k(x, x') = amplitude^2 * C(dist(x, x'))
/// with per-dimension lengthscales entering through
/// dist^2 = sum_i ((x_i - x'_i) / lengthscale_i)^2.
struct KernelConfig {
  KernelFamily family = KernelFamily::RBF;
  double amplitude = 1.0;          // tau; k(x, x) = tau^2
  Eigen::VectorXd lengthscales;    // one per input dimension, > 0
  double smoothness = 1.5;         // Matern nu, one of {0.5, 1.5, 2.5}

  Eigen::Index dim() const { return lengthscales.size(); }
  void validate() const;
  bool approx_equal(const KernelConfig& other, double rel_tol = 1e-12) const;

  static KernelConfig rbf(double amplitude, Eigen::VectorXd lengthscales);
  static KernelConfig matern(double amplitude, Eigen::VectorXd lengthscales,
                             double smoothness = 1.5);
};

double kernel_eval(const KernelConfig& k, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b);

/// k(A_i, b) for every row of A.
Eigen::VectorXd kernel_column(const KernelConfig& k,
                              const Eigen::Ref<const Eigen::MatrixXd>& rows,
                              const Eigen::Ref<const Eigen::VectorXd>& b);

/// K(A, B) with K_ij = k(A_i, B_j).
Eigen::MatrixXd kernel_matrix(const KernelConfig& k,
                              const Eigen::Ref<const Eigen::MatrixXd>& a,
                              const Eigen::Ref<const Eigen::MatrixXd>& b);

/// Correlation profile C(r) (unit amplitude) as a function of the scaled
/// distance r, applied elementwise in place. Shared by kernel evaluation and
/// the likelihood gradient.
void apply_correlation(const KernelConfig& k, Eigen::ArrayXd& scaled_dist_sq);

}  // namespace glws
