#include "glws/kl.hpp"

#include <cmath>

#include "glws/errors.hpp"

namespace glws {

namespace {

Eigen::MatrixXd correlation_matrix(double sigma2, double corr_len,
                                   const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::MatrixXd c(a.size(), b.size());
  const double inv = 1.0 / (2.0 * corr_len * corr_len);
  for (Eigen::Index j = 0; j < b.size(); ++j)
    c.col(j) = (sigma2 * (-(a.array() - b[j]).square() * inv).exp()).matrix();
  return c;
}

}  // namespace

KLExpansion kl_expand(double sigma2, double corr_len, double t_begin, double t_end,
                      int grid, int n_terms) {
  if (!(sigma2 > 0.0) || !(corr_len > 0.0))
    throw InvalidArgumentError("kl_expand: sigma2 and corr_len must be positive");
  if (!(t_end > t_begin)) throw InvalidArgumentError("kl_expand: empty time interval");
  if (grid < 100) throw InvalidArgumentError("kl_expand: grid must be at least 100");
  if (n_terms < 1 || n_terms > grid)
    throw InvalidArgumentError("kl_expand: invalid number of terms");

  KLExpansion kl;
  kl.sigma2 = sigma2;
  kl.corr_len = corr_len;
  kl.times = Eigen::VectorXd::LinSpaced(grid, t_begin, t_end);
  const double dt = kl.times[1] - kl.times[0];
  kl.weights = Eigen::VectorXd::Constant(grid, dt);
  kl.weights[0] *= 0.5;
  kl.weights[grid - 1] *= 0.5;

  // Symmetrized Nystrom: eig(W^1/2 C W^1/2), then phi = W^-1/2 v.
  const Eigen::MatrixXd c = correlation_matrix(sigma2, corr_len, kl.times, kl.times);
  const Eigen::VectorXd sw = kl.weights.array().sqrt();
  Eigen::MatrixXd b = sw.asDiagonal() * c * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success) throw Error("kl_expand: eigendecomposition failed");

  kl.eigenvalues.resize(n_terms);
  kl.eigenfunctions.resize(grid, n_terms);
  for (int j = 0; j < n_terms; ++j) {
    const Eigen::Index src = grid - 1 - j;  // SelfAdjointEigenSolver sorts ascending
    const double lambda = eig.eigenvalues()[src];
    if (!(lambda > 0.0))
      throw Error("kl_expand: discretized correlation operator is not positive definite");
    kl.eigenvalues[j] = lambda;
    Eigen::VectorXd phi = eig.eigenvectors().col(src).array() / sw.array();
    // Sign convention: make the first significant entry positive so
    // expansions are reproducible across eigensolver builds.
    for (Eigen::Index i = 0; i < grid; ++i) {
      if (std::abs(phi[i]) > 1e-8) {
        if (phi[i] < 0.0) phi = -phi;
        break;
      }
    }
    kl.eigenfunctions.col(j) = phi;
  }
  return kl;
}

double KLExpansion::eigenfunction_at(Eigen::Index j, double t) const {
  Eigen::VectorXd tq(1);
  tq[0] = t;
  const Eigen::MatrixXd c = correlation_matrix(sigma2, corr_len, tq, times);
  return (c * weights.cwiseProduct(eigenfunctions.col(j)))(0) / eigenvalues[j];
}

Eigen::MatrixXd KLExpansion::basis_at(const Eigen::Ref<const Eigen::VectorXd>& query_times,
                                      bool sqrt_convention) const {
  const Eigen::MatrixXd c = correlation_matrix(sigma2, corr_len, query_times, times);
  Eigen::MatrixXd basis(query_times.size(), terms());
  for (Eigen::Index j = 0; j < terms(); ++j) {
    const double scale =
        (sqrt_convention ? std::sqrt(eigenvalues[j]) : eigenvalues[j]) / eigenvalues[j];
    basis.col(j) = scale * (c * weights.cwiseProduct(eigenfunctions.col(j)));
  }
  return basis;
}

double KLExpansion::eigenproblem_residual() const {
  const Eigen::MatrixXd c = correlation_matrix(sigma2, corr_len, times, times);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < terms(); ++j) {
    const Eigen::VectorXd lhs = c * weights.cwiseProduct(eigenfunctions.col(j));
    const Eigen::VectorXd rhs = eigenvalues[j] * eigenfunctions.col(j);
    worst = std::max(worst, (lhs - rhs).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace glws
