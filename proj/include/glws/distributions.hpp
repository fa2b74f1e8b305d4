#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "glws/rng.hpp"

namespace glws {

/// One independent input marginal: normal, truncated normal, or uniform.
struct Marginal {
  enum class Kind { Normal, TruncatedNormal, Uniform };
  Kind kind = Kind::Normal;
  double mu = 0.0, sigma = 1.0;  // normal family
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static Marginal normal(double mu, double sigma);
  static Marginal truncated_normal(double mu, double sigma, double lo, double hi);
  static Marginal uniform(double lo, double hi);

  double quantile(double u) const;
  double log_density(double x) const;
  double cdf(double x) const;
};

/// Known input probability p_x as a product of independent marginals, with
/// the per-dimension quantile transform needed by Latin-hypercube designs.
/// Sampling goes through the quantile transform, so draws match the
/// evaluator by construction.
class InputDistribution {
 public:
  explicit InputDistribution(std::vector<Marginal> marginals);

  static InputDistribution standard_normal(Eigen::Index d);
  static InputDistribution independent_normal(const Eigen::VectorXd& means,
                                              const Eigen::VectorXd& stds);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(marginals_.size()); }
  const Marginal& marginal(Eigen::Index d) const { return marginals_[d]; }

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double quantile(Eigen::Index dim, double u) const;
  Eigen::VectorXd sample(Rng& rng) const;
  Eigen::MatrixXd sample_matrix(Eigen::Index n, Rng& rng) const;

 private:
  std::vector<Marginal> marginals_;
};

}  // namespace glws
