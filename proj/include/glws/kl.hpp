#pragma once

#include <Eigen/Dense>

namespace glws {

/// Truncated Karhunen-Loeve expansion of a stationary Gaussian process with
/// squared-exponential correlation sigma2 * exp(-lag^2 / (2 len^2)),
/// discretized by Nystrom with trapezoid weights on a uniform grid.
/// Eigenvalues are descending; eigenfunctions have unit discrete-L2 norm.
struct KLExpansion {
  Eigen::VectorXd times;            // Nystrom grid
  Eigen::VectorXd weights;          // trapezoid quadrature weights
  Eigen::VectorXd eigenvalues;      // top n_terms, descending
  Eigen::MatrixXd eigenfunctions;   // grid x n_terms
  double sigma2 = 0.0;
  double corr_len = 0.0;

  Eigen::Index terms() const { return eigenvalues.size(); }

  /// Smooth Nystrom extension of eigenfunction j off the grid.
  double eigenfunction_at(Eigen::Index j, double t) const;

  /// Rows are [coef_1(t), ..., coef_n(t)] with coef_i = lambda_i phi_i(t),
  /// or sqrt(lambda_i) phi_i(t) under the conventional scaling. The process
  /// realization for input x is then basis * x.
  Eigen::MatrixXd basis_at(const Eigen::Ref<const Eigen::VectorXd>& query_times,
                           bool sqrt_convention) const;

  /// Residual of the discretized eigenproblem, max over kept pairs:
  /// || C W phi_j - lambda_j phi_j ||_inf.
  double eigenproblem_residual() const;
};

KLExpansion kl_expand(double sigma2, double corr_len, double t_begin, double t_end,
                      int grid, int n_terms);

}  // namespace glws
