#include "glws/acquisition.hpp"

#include <cmath>

#include "glws/errors.hpp"

namespace glws {

namespace {

void check_generation(const PoolCache& cache, const DensityEstimate& pdf) {
  if (pdf.generation >= 0 && pdf.generation != cache.generation())
    throw StalenessError("acquisition: density estimate and cache generations differ");
}

}  // namespace

void AcquisitionParams::validate() const {
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidArgumentError("AcquisitionParams: t must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidArgumentError("AcquisitionParams: alpha must be non-negative");
}

Eigen::VectorXd lw_scores(const PoolCache& cache,
                          const Eigen::Ref<const Eigen::VectorXd>& log_px,
                          const DensityEstimate& pdf_hat) {
  if (log_px.size() != cache.pool_size())
    throw InvalidArgumentError("lw_scores: log_px size mismatch");
  check_generation(cache, pdf_hat);
  const Eigen::VectorXd& means = cache.means();
  const Eigen::VectorXd& vars = cache.vars();
  Eigen::VectorXd scores(cache.pool_size());
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    scores[i] = vars[i] * std::exp(log_px[i] - pdf_hat.log_pdf_at(means[i]));
  return scores;
}

Eigen::VectorXd glw_scores(const PoolCache& cache,
                           const Eigen::Ref<const Eigen::VectorXd>& log_px,
                           const DensityEstimate& pdf_center,
                           const DensityEstimate& pdf_plus,
                           const DensityEstimate& pdf_minus,
                           const AcquisitionParams& params) {
  params.validate();
  if (log_px.size() != cache.pool_size())
    throw InvalidArgumentError("glw_scores: log_px size mismatch");
  check_generation(cache, pdf_center);
  check_generation(cache, pdf_plus);
  check_generation(cache, pdf_minus);
  const Eigen::VectorXd& means = cache.means();
  const Eigen::VectorXd& vars = cache.vars();
  const double t = params.t;
  const double alpha = params.alpha;
  Eigen::VectorXd scores(cache.pool_size());
  if (alpha == 0.0) {
    // The three shifted densities coincide, so the weight triples exactly.
    for (Eigen::Index i = 0; i < scores.size(); ++i)
      scores[i] = 3.0 * (vars[i] * std::exp(log_px[i] - t * pdf_center.log_pdf_at(means[i])));
    return scores;
  }
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double sd = std::sqrt(std::max(vars[i], 0.0));
    const double w0 = std::exp(log_px[i] - t * pdf_center.log_pdf_at(means[i]));
    const double wp = std::exp(log_px[i] - t * pdf_plus.log_pdf_at(means[i] + alpha * sd));
    const double wm = std::exp(log_px[i] - t * pdf_minus.log_pdf_at(means[i] - alpha * sd));
    scores[i] = vars[i] * (w0 + wp + wm);
  }
  return scores;
}

double integral_lw_criterion(const Eigen::Ref<const Eigen::VectorXd>& candidate,
                             const PoolCache& cache, const Posterior& state,
                             const Eigen::Ref<const Eigen::VectorXd>& log_px,
                             const DensityEstimate& pdf_hat) {
  if (log_px.size() != cache.pool_size())
    throw InvalidArgumentError("integral_lw_criterion: log_px size mismatch");
  if (candidate.size() != state.dim())
    throw InvalidArgumentError("integral_lw_criterion: dimension mismatch");
  check_generation(cache, pdf_hat);

  const double tau2 = state.prior_variance();
  const Eigen::Index n = state.size();
  Eigen::VectorXd cov;
  double var_c = tau2;
  if (n > 0) {
    const Eigen::VectorXd k = kernel_column(state.kernel(), state.data().inputs(), candidate);
    const Eigen::VectorXd b = state.solve_lower(k);
    var_c = tau2 - b.squaredNorm();
    const Eigen::VectorXd t_vec =
        state.chol_lower().transpose().triangularView<Eigen::Upper>().solve(b);
    cov = kernel_column(state.kernel(), cache.points(), candidate) - cache.cross_cov() * t_vec;
  } else {
    cov = kernel_column(state.kernel(), cache.points(), candidate);
  }

  // The hypothetical variance at an already-interpolated candidate reduces
  // nothing (the posterior covariance with it is zero), so skip the rank-one
  // term instead of dividing by a vanishing Schur complement.
  const bool interpolated = var_c <= kAppendVarFloorRel * tau2;
  const double schur = var_c + state.jitter();
  const Eigen::VectorXd& means = cache.means();
  const Eigen::VectorXd& vars = cache.vars();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cache.pool_size(); ++i) {
    double v = vars[i];
    if (!interpolated) v = std::max(v - cov[i] * cov[i] / schur, 0.0);
    acc += v * std::exp(log_px[i] - pdf_hat.log_pdf_at(means[i]));
  }
  return acc / static_cast<double>(cache.pool_size());
}

}  // namespace glws
