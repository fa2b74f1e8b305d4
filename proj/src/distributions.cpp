#include "glws/distributions.hpp"

#include <cmath>

#include "glws/errors.hpp"

namespace glws {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;
}

Marginal Marginal::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgumentError("Marginal: sigma must be positive");
  Marginal m;
  m.kind = Kind::Normal;
  m.mu = mu;
  m.sigma = sigma;
  return m;
}

Marginal Marginal::truncated_normal(double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0.0)) throw InvalidArgumentError("Marginal: sigma must be positive");
  if (!(lo < hi)) throw InvalidArgumentError("Marginal: empty truncation interval");
  Marginal m;
  m.kind = Kind::TruncatedNormal;
  m.mu = mu;
  m.sigma = sigma;
  m.lo = lo;
  m.hi = hi;
  return m;
}

Marginal Marginal::uniform(double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgumentError("Marginal: empty uniform interval");
  Marginal m;
  m.kind = Kind::Uniform;
  m.lo = lo;
  m.hi = hi;
  return m;
}

double Marginal::cdf(double x) const {
  switch (kind) {
    case Kind::Uniform:
      return std::min(1.0, std::max(0.0, (x - lo) / (hi - lo)));
    case Kind::Normal:
      return normal_cdf((x - mu) / sigma);
    case Kind::TruncatedNormal: {
      if (x <= lo) return 0.0;
      if (x >= hi) return 1.0;
      const double c_lo = std::isfinite(lo) ? normal_cdf((lo - mu) / sigma) : 0.0;
      const double c_hi = std::isfinite(hi) ? normal_cdf((hi - mu) / sigma) : 1.0;
      return (normal_cdf((x - mu) / sigma) - c_lo) / (c_hi - c_lo);
    }
  }
  return 0.0;
}

double Marginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw InvalidArgumentError("Marginal::quantile: u must lie in (0,1)");
  switch (kind) {
    case Kind::Uniform:
      return lo + u * (hi - lo);
    case Kind::Normal:
      return mu + sigma * normal_quantile(u);
    case Kind::TruncatedNormal: {
      const double c_lo = std::isfinite(lo) ? normal_cdf((lo - mu) / sigma) : 0.0;
      const double c_hi = std::isfinite(hi) ? normal_cdf((hi - mu) / sigma) : 1.0;
      return mu + sigma * normal_quantile(c_lo + u * (c_hi - c_lo));
    }
  }
  return 0.0;
}

double Marginal::log_density(double x) const {
  switch (kind) {
    case Kind::Uniform:
      if (x < lo || x > hi) return -std::numeric_limits<double>::infinity();
      return -std::log(hi - lo);
    case Kind::Normal: {
      const double z = (x - mu) / sigma;
      return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
    }
    case Kind::TruncatedNormal: {
      if (x < lo || x > hi) return -std::numeric_limits<double>::infinity();
      const double c_lo = std::isfinite(lo) ? normal_cdf((lo - mu) / sigma) : 0.0;
      const double c_hi = std::isfinite(hi) ? normal_cdf((hi - mu) / sigma) : 1.0;
      const double z = (x - mu) / sigma;
      return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi - std::log(c_hi - c_lo);
    }
  }
  return 0.0;
}

InputDistribution::InputDistribution(std::vector<Marginal> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw InvalidArgumentError("InputDistribution: no marginals");
}

InputDistribution InputDistribution::standard_normal(Eigen::Index d) {
  std::vector<Marginal> m(static_cast<std::size_t>(d), Marginal::normal(0.0, 1.0));
  return InputDistribution(std::move(m));
}

InputDistribution InputDistribution::independent_normal(const Eigen::VectorXd& means,
                                                        const Eigen::VectorXd& stds) {
  if (means.size() != stds.size())
    throw InvalidArgumentError("independent_normal: size mismatch");
  std::vector<Marginal> m;
  m.reserve(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i)
    m.push_back(Marginal::normal(means[i], stds[i]));
  return InputDistribution(std::move(m));
}

double InputDistribution::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw InvalidArgumentError("log_density: dimension mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) acc += marginals_[i].log_density(x[i]);
  return acc;
}

double InputDistribution::quantile(Eigen::Index d, double u) const {
  return marginals_[d].quantile(u);
}

Eigen::VectorXd InputDistribution::sample(Rng& rng) const {
  Eigen::VectorXd x(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) x[i] = marginals_[i].quantile(rng.uniform01());
  return x;
}

Eigen::MatrixXd InputDistribution::sample_matrix(Eigen::Index n, Rng& rng) const {
  Eigen::MatrixXd x(n, dim());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < dim(); ++j) x(i, j) = marginals_[j].quantile(rng.uniform01());
  return x;
}

}  // namespace glws
