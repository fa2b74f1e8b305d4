#pragma once

#include <Eigen/Dense>

#include "glws/gp.hpp"
#include "glws/kde.hpp"

namespace glws {

/// Parameters of the generalized likelihood-weighted family. The exponent t
/// controls the emphasis on rare predicted responses; alpha shifts the
/// surrogate by +-alpha posterior standard deviations to add exploration.
/// (t = 1, alpha = 0) designates the original likelihood-weighted score.
struct AcquisitionParams {
  double t = 1.0;
  double alpha = 0.0;
  void validate() const;
};

/// Likelihood-weighted scores over the pool:
///   score_i = var_i * exp(log p_x(x_i) - log p_hat(mean_i)).
/// pdf_hat must be built from the current surrogate means over the MC set;
/// a generation-tagged estimate from a different surrogate generation than
/// the cache raises StalenessError.
Eigen::VectorXd lw_scores(const PoolCache& cache,
                          const Eigen::Ref<const Eigen::VectorXd>& log_px,
                          const DensityEstimate& pdf_hat);

/// Generalized scores: three weight terms at shifts {0, +alpha, -alpha},
/// each evaluating the matching shifted-surrogate density at
/// mean_i + shift * std_i, raised to the exponent t in log space.
Eigen::VectorXd glw_scores(const PoolCache& cache,
                           const Eigen::Ref<const Eigen::VectorXd>& log_px,
                           const DensityEstimate& pdf_center,
                           const DensityEstimate& pdf_plus,
                           const DensityEstimate& pdf_minus,
                           const AcquisitionParams& params);

/// Integral criterion: Monte-Carlo average over the pool of the hypothetical
/// posterior variance given one more observation at `candidate`, weighted by
/// p_x / p_hat. Smaller is better; the variance reduction is zero when the
/// candidate is already interpolated.
double integral_lw_criterion(const Eigen::Ref<const Eigen::VectorXd>& candidate,
                             const PoolCache& cache, const Posterior& state,
                             const Eigen::Ref<const Eigen::VectorXd>& log_px,
                             const DensityEstimate& pdf_hat);

}  // namespace glws
