#include "glws/fit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "glws/errors.hpp"
#include "glws/rng.hpp"

namespace glws {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;
constexpr double kLog2Pi = 1.8378770664093454;
const double kNegInf = -std::numeric_limits<double>::infinity();

struct LikelihoodModel {
  const Dataset& data;
  KernelFamily family;
  double smoothness;
  double jitter_rel;

  KernelConfig config_from(const Eigen::VectorXd& theta) const {
    KernelConfig k;
    k.family = family;
    k.smoothness = smoothness;
    k.amplitude = std::exp(theta[0]);
    k.lengthscales = theta.tail(theta.size() - 1).array().exp();
    return k;
  }

  // Negative log marginal likelihood and gradient in log-parameter space.
  double eval(const Eigen::VectorXd& theta, Eigen::VectorXd* grad) const {
    const KernelConfig k = config_from(theta);
    if (!grad) return -log_marginal_likelihood(data, k, jitter_rel);
    Eigen::VectorXd g;
    const double lml = log_marginal_likelihood_gradient(data, k, g, jitter_rel);
    if (!std::isfinite(lml)) return std::numeric_limits<double>::infinity();
    *grad = -g;
    return -lml;
  }
};

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Projected L-BFGS with Armijo backtracking. Minimizes f over a box.
double minimize_lbfgs(const LikelihoodModel& model, Eigen::VectorXd& x,
                      const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      int max_iterations) {
  constexpr int kMemory = 8;
  constexpr double kArmijo = 1e-4;
  const Eigen::Index p = x.size();
  x = clamp_to_box(x, lo, hi);
  Eigen::VectorXd grad(p);
  double f = model.eval(x, &grad);
  if (!std::isfinite(f)) return f;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Two-loop recursion on the raw gradient.
    Eigen::VectorXd q = grad;
    std::vector<double> a(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const Eigen::VectorXd& sl = s_hist.back();
      const Eigen::VectorXd& yl = y_hist.back();
      q *= sl.dot(yl) / yl.squaredNorm();
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(grad) > -1e-12 * dir.norm() * grad.norm()) dir = -grad;

    double step = 1.0;
    Eigen::VectorXd x_new, grad_new(p);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = clamp_to_box(x + step * dir, lo, hi);
      const Eigen::VectorXd delta = x_new - x;
      if (delta.norm() < 1e-14) break;
      f_new = model.eval(x_new, &grad_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * grad.dot(delta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = grad_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    const double improvement = f - f_new;
    x = x_new;
    f = f_new;
    grad = grad_new;
    // Projected-gradient stationarity.
    const double stat = (x - clamp_to_box(x - grad, lo, hi)).lpNorm<Eigen::Infinity>();
    if (stat < 1e-7 * (1.0 + std::abs(f)) || improvement < 1e-11 * (1.0 + std::abs(f)))
      break;
  }
  return f;
}

}  // namespace

double log_marginal_likelihood(const Dataset& data, const KernelConfig& kernel,
                               double jitter_rel) {
  const Eigen::Index n = data.size();
  if (n == 0) return 0.0;
  Eigen::MatrixXd k = kernel_matrix(kernel, data.inputs(), data.inputs());
  k.diagonal().array() += jitter_rel * kernel.amplitude * kernel.amplitude;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd alpha = llt.solve(data.responses());
  const double quad = data.responses().dot(alpha);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
}

double log_marginal_likelihood_gradient(const Dataset& data, const KernelConfig& kernel,
                                        Eigen::VectorXd& grad, double jitter_rel) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = kernel.dim();
  grad = Eigen::VectorXd::Zero(d + 1);
  if (n == 0) return 0.0;
  const double tau2 = kernel.amplitude * kernel.amplitude;
  Eigen::MatrixXd k = kernel_matrix(kernel, data.inputs(), data.inputs());
  k.diagonal().array() += jitter_rel * tau2;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return kNegInf;
  const Eigen::VectorXd alpha = llt.solve(data.responses());
  const double quad = data.responses().dot(alpha);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double lml = -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;

  // A = alpha alpha^T - K^{-1}; gradient entries are 0.5 tr(A dK/dtheta).
  // The whole covariance scales with tau^2 (jitter included), so
  // d/dlog(tau) gives tr(A K) = alpha^T y - n.
  grad[0] = alpha.dot(data.responses()) - static_cast<double>(n);
  Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd a = alpha * alpha.transpose() - kinv;

  // dK/dlog(l_m) = tau^2 * W(r) .* D_m with D_m the scaled squared
  // per-dimension differences; W depends on the family.
  Eigen::MatrixXd w(n, n);
  const Eigen::MatrixXd& x = data.inputs();
  if (kernel.family == KernelFamily::RBF) {
    Eigen::ArrayXXd r2 = Eigen::ArrayXXd::Zero(n, n);
    for (Eigen::Index m = 0; m < d; ++m) {
      const double inv_l = 1.0 / kernel.lengthscales[m];
      Eigen::ArrayXd col = x.col(m).array() * inv_l;
      r2 += (col.replicate(1, n) - col.transpose().replicate(n, 1)).square();
    }
    w = (tau2 * (-0.5 * r2).exp()).matrix();
  } else {
    Eigen::ArrayXXd r2 = Eigen::ArrayXXd::Zero(n, n);
    for (Eigen::Index m = 0; m < d; ++m) {
      const double inv_l = 1.0 / kernel.lengthscales[m];
      Eigen::ArrayXd col = x.col(m).array() * inv_l;
      r2 += (col.replicate(1, n) - col.transpose().replicate(n, 1)).square();
    }
    Eigen::ArrayXXd r = r2.sqrt();
    if (kernel.smoothness == 0.5) {
      // dC/dlog(l_m) = exp(-r) * D_m / r; the diagonal (r = 0) contributes 0.
      Eigen::ArrayXXd rsafe = r.max(1e-300);
      w = (tau2 * (-r).exp() / rsafe).matrix();
      w.diagonal().setZero();
    } else if (kernel.smoothness == 1.5) {
      w = (3.0 * tau2 * (-kSqrt3 * r).exp()).matrix();
    } else {
      w = ((5.0 / 3.0) * tau2 * (1.0 + kSqrt5 * r) * (-kSqrt5 * r).exp()).matrix();
    }
  }
  for (Eigen::Index m = 0; m < d; ++m) {
    const double inv_l2 = 1.0 / (kernel.lengthscales[m] * kernel.lengthscales[m]);
    Eigen::ArrayXd col = x.col(m).array();
    Eigen::ArrayXXd dm =
        (col.replicate(1, n) - col.transpose().replicate(n, 1)).square() * inv_l2;
    grad[m + 1] = 0.5 * (a.array() * w.array() * dm).sum();
  }
  return lml;
}

KernelConfig fit_hyperparameters(const Dataset& data, KernelFamily family,
                                 const FitOptions& opts) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();
  if (n < 2) throw InvalidArgumentError("fit_hyperparameters: need at least 2 samples");

  // Scales for the bound boxes.
  double y_scale = std::sqrt(
      (data.responses().array() - data.responses().mean()).square().sum() /
      static_cast<double>(n - 1));
  if (!(y_scale > 0.0)) y_scale = 1.0;
  Eigen::VectorXd span(d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const double s = data.inputs().col(m).maxCoeff() - data.inputs().col(m).minCoeff();
    span[m] = s > 0.0 ? s : 1.0;
  }

  const double ln10 = std::log(10.0);
  Eigen::VectorXd lo(d + 1), hi(d + 1);
  lo[0] = std::log(y_scale) - opts.log10_amp_halfwidth * ln10;
  hi[0] = std::log(y_scale) + opts.log10_amp_halfwidth * ln10;
  for (Eigen::Index m = 0; m < d; ++m) {
    lo[m + 1] = std::log(span[m]) + opts.log10_len_lo * ln10;
    hi[m + 1] = std::log(span[m]) + opts.log10_len_hi * ln10;
  }

  const LikelihoodModel model{data, family, opts.smoothness, opts.jitter_rel};
  Rng rng(derive_seed(opts.seed, 0x66697421));

  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Eigen::VectorXd x0(d + 1);
    if (r == 0) {
      x0[0] = std::log(y_scale);
      for (Eigen::Index m = 0; m < d; ++m) x0[m + 1] = std::log(0.25 * span[m]);
    } else {
      x0[0] = std::log(y_scale) + std::log(0.3) + rng.uniform01() * std::log(10.0 / 0.3);
      for (Eigen::Index m = 0; m < d; ++m)
        x0[m + 1] = std::log(span[m]) + std::log(0.05) + rng.uniform01() * std::log(1.0 / 0.05);
    }
    Eigen::VectorXd x = x0;
    const double f = minimize_lbfgs(model, x, lo, hi, opts.max_iterations);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  if (!std::isfinite(best_f)) {
    KernelConfig fallback;
    fallback.family = family;
    fallback.smoothness = opts.smoothness;
    fallback.amplitude = y_scale;
    fallback.lengthscales = 0.25 * span;
    throw FitError("fit_hyperparameters: no restart reached a finite likelihood",
                   std::move(fallback));
  }
  KernelConfig out = model.config_from(best_x);
  out.validate();
  return out;
}

}  // namespace glws
