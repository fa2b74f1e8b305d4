#include "glws/kernel.hpp"

#include <cmath>

#include "glws/errors.hpp"

namespace glws {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

bool supported_smoothness(double nu) { return nu == 0.5 || nu == 1.5 || nu == 2.5; }

}  // namespace

void KernelConfig::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude))
    throw InvalidArgumentError("kernel amplitude must be positive and finite");
  if (lengthscales.size() == 0)
    throw InvalidArgumentError("kernel lengthscales are empty");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i)
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i]))
      throw InvalidArgumentError("kernel lengthscales must be positive and finite");
  if (family == KernelFamily::Matern && !supported_smoothness(smoothness))
    throw InvalidArgumentError("Matern smoothness must be one of 0.5, 1.5, 2.5");
}

bool KernelConfig::approx_equal(const KernelConfig& other, double rel_tol) const {
  if (family != other.family || lengthscales.size() != other.lengthscales.size())
    return false;
  if (family == KernelFamily::Matern && smoothness != other.smoothness) return false;
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  if (!close(amplitude, other.amplitude)) return false;
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i)
    if (!close(lengthscales[i], other.lengthscales[i])) return false;
  return true;
}

KernelConfig KernelConfig::rbf(double amplitude, Eigen::VectorXd lengthscales) {
  KernelConfig k;
  k.family = KernelFamily::RBF;
  k.amplitude = amplitude;
  k.lengthscales = std::move(lengthscales);
  k.validate();
  return k;
}

KernelConfig KernelConfig::matern(double amplitude, Eigen::VectorXd lengthscales,
                                  double smoothness) {
  KernelConfig k;
  k.family = KernelFamily::Matern;
  k.amplitude = amplitude;
  k.lengthscales = std::move(lengthscales);
  k.smoothness = smoothness;
  k.validate();
  return k;
}

void apply_correlation(const KernelConfig& k, Eigen::ArrayXd& r2) {
  if (k.family == KernelFamily::RBF) {
    r2 = (-0.5 * r2).exp();
    return;
  }
  const Eigen::ArrayXd r = r2.sqrt();
  if (k.smoothness == 0.5) {
    r2 = (-r).exp();
  } else if (k.smoothness == 1.5) {
    r2 = (1.0 + kSqrt3 * r) * (-kSqrt3 * r).exp();
  } else {
    r2 = (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * (-kSqrt5 * r).exp();
  }
}

double kernel_eval(const KernelConfig& k, const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b) {
  k.validate();
  if (a.size() != k.dim() || b.size() != k.dim())
    throw InvalidArgumentError("kernel_eval: input dimension mismatch");
  if (!a.allFinite() || !b.allFinite())
    throw InvalidArgumentError("kernel_eval: non-finite input");
  Eigen::ArrayXd r2(1);
  r2[0] = ((a - b).array() / k.lengthscales.array()).square().sum();
  apply_correlation(k, r2);
  return k.amplitude * k.amplitude * r2[0];
}

Eigen::VectorXd kernel_column(const KernelConfig& k,
                              const Eigen::Ref<const Eigen::MatrixXd>& rows,
                              const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (rows.cols() != k.dim() || b.size() != k.dim())
    throw InvalidArgumentError("kernel_column: input dimension mismatch");
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(rows.rows());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double inv_l = 1.0 / k.lengthscales[j];
    r2 += ((rows.col(j).array() - b[j]) * inv_l).square();
  }
  apply_correlation(k, r2);
  return (k.amplitude * k.amplitude * r2).matrix();
}

Eigen::MatrixXd kernel_matrix(const KernelConfig& k,
                              const Eigen::Ref<const Eigen::MatrixXd>& a,
                              const Eigen::Ref<const Eigen::MatrixXd>& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    out.col(j) = kernel_column(k, a, b.row(j).transpose());
  return out;
}

}  // namespace glws
