#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "glws/dataset.hpp"
#include "glws/errors.hpp"
#include "glws/kernel.hpp"

namespace glws {

/// Hyperparameter optimization failed on every restart; carries the
/// best-so-far configuration.
class FitError : public Error {
 public:
  FitError(const std::string& msg, KernelConfig best)
      : Error(msg), best(std::move(best)) {}
  KernelConfig best;
};

struct FitOptions {
  int restarts = 5;
  std::uint64_t seed = 0;
  int max_iterations = 100;       // per restart
  double smoothness = 1.5;        // Matern only
  double jitter_rel = 1e-10;
  // Box bounds in log10 units, relative to the data scale (amplitude) and
  // the per-dimension input span (lengthscales).
  double log10_amp_halfwidth = 3.0;
  double log10_len_lo = -2.0;
  double log10_len_hi = 2.0;
};

/// Log marginal likelihood of the data under the kernel (jitter included in
/// the covariance). Returns -inf when the covariance cannot be factorized.
double log_marginal_likelihood(const Dataset& data, const KernelConfig& kernel,
                               double jitter_rel = 1e-10);

/// Likelihood and its gradient with respect to [log amplitude,
/// log lengthscale_1, ..., log lengthscale_d].
double log_marginal_likelihood_gradient(const Dataset& data, const KernelConfig& kernel,
                                        Eigen::VectorXd& grad, double jitter_rel = 1e-10);

/// Maximizes the log marginal likelihood over (amplitude, lengthscales) by
/// multi-start projected L-BFGS in log-parameter space. Deterministic for a
/// fixed seed. Throws FitError when no restart produces a finite likelihood.
KernelConfig fit_hyperparameters(const Dataset& data, KernelFamily family,
                                 const FitOptions& opts = {});

}  // namespace glws
