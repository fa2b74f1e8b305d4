#include "glws/realization.hpp"

#include <cmath>

#include "glws/errors.hpp"
#include "glws/rng.hpp"

namespace glws {

namespace {

using RowMajorMap = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::MatrixXd chol_with_jitter(Eigen::MatrixXd gram, double scale,
                                 const RealizationOptions& opts) {
  for (double rel = opts.jitter_rel; rel <= opts.jitter_rel_max * (1.0 + 1e-12);
       rel *= 10.0) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += rel * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw Error("sample_prior_realization: grid covariance not factorizable at maximum jitter");
}

// values <- (L_0 kron ... kron L_{d-1}) z for row-major tensor layout.
Eigen::VectorXd kronecker_sample(const std::vector<Eigen::MatrixXd>& factors,
                                 Eigen::VectorXd z) {
  const int d = static_cast<int>(factors.size());
  const Eigen::Index g = factors[0].rows();
  if (d == 1) return factors[0] * z;
  if (d == 2) {
    RowMajorMap m(z.data(), g, g);
    Eigen::MatrixXd v = factors[0] * (m * factors[1].transpose());
    Eigen::VectorXd out(g * g);
    RowMajorMap(out.data(), g, g) = v;
    return out;
  }
  // d == 3: apply along axis 2 and axis 0 as single reshapes, axis 1 per slab.
  const Eigen::Index n = g * g * g;
  {
    RowMajorMap m(z.data(), g * g, g);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tmp =
        m * factors[2].transpose();
    m = tmp;
  }
  for (Eigen::Index i = 0; i < g; ++i) {
    RowMajorMap slab(z.data() + i * g * g, g, g);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tmp =
        factors[1] * slab;
    slab = tmp;
  }
  {
    RowMajorMap m(z.data(), g, g * g);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tmp =
        factors[0] * m;
    m = tmp;
  }
  return z;
}

}  // namespace

double GridRealization::value_at_node(const std::vector<Eigen::Index>& idx) const {
  Eigen::Index linear = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) linear = linear * axes_[k].size() + idx[k];
  return values_[linear];
}

double GridRealization::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Index d = dim();
  if (x.size() != d) throw InvalidArgumentError("GridRealization: dimension mismatch");
  if (!x.allFinite()) throw InvalidArgumentError("GridRealization: non-finite input");
  Eigen::Index base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  Eigen::Index stride[3] = {1, 1, 1};
  for (Eigen::Index k = d - 2; k >= 0; --k)
    stride[k] = stride[k + 1] * axes_[k + 1].size();
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index g = axes_[k].size();
    const double step = (box_.hi[k] - box_.lo[k]) / static_cast<double>(g - 1);
    double u = (x[k] - box_.lo[k]) / step;
    u = std::min(std::max(u, 0.0), static_cast<double>(g - 1));
    Eigen::Index i = std::min(static_cast<Eigen::Index>(u), g - 2);
    base[k] = i;
    frac[k] = u - static_cast<double>(i);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Eigen::Index linear = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const bool high = (corner >> k) & 1;
      w *= high ? frac[k] : 1.0 - frac[k];
      linear += (base[k] + (high ? 1 : 0)) * stride[k];
    }
    acc += w * values_[linear];
  }
  return acc;
}

GridRealization sample_prior_realization(const KernelConfig& kernel, const Box& domain,
                                         int grid_per_dim, std::uint64_t seed,
                                         RealizationOptions opts) {
  kernel.validate();
  const Eigen::Index d = domain.dim();
  if (d < 1 || d > 3)
    throw InvalidArgumentError("sample_prior_realization: dimension must be 1..3");
  if (kernel.dim() != d)
    throw InvalidArgumentError("sample_prior_realization: kernel/domain dimension mismatch");
  if (grid_per_dim < 2)
    throw InvalidArgumentError("sample_prior_realization: need at least 2 grid points per dim");

  GridRealization out;
  out.box_ = domain;
  out.grid_per_dim_ = grid_per_dim;
  out.axes_.resize(d);
  Eigen::Index total = 1;
  for (Eigen::Index k = 0; k < d; ++k) {
    out.axes_[k] = Eigen::VectorXd::LinSpaced(grid_per_dim, domain.lo[k], domain.hi[k]);
    total *= grid_per_dim;
  }

  Rng rng(derive_seed(seed, 0x67726964));
  Eigen::VectorXd z(total);
  for (Eigen::Index i = 0; i < total; ++i) z[i] = rng.normal();

  if (kernel.family == KernelFamily::RBF) {
    // RBF with diagonal lengthscales factorizes over dimensions on a tensor
    // grid, so the Cholesky of the grid covariance is the Kronecker product
    // of per-dimension factors.
    std::vector<Eigen::MatrixXd> factors(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::VectorXd& ax = out.axes_[k];
      Eigen::MatrixXd c(ax.size(), ax.size());
      const double inv_l = 1.0 / kernel.lengthscales[k];
      for (Eigen::Index j = 0; j < ax.size(); ++j)
        c.col(j) = (-0.5 * ((ax.array() - ax[j]) * inv_l).square()).exp().matrix();
      factors[k] = chol_with_jitter(std::move(c), 1.0, opts);
    }
    out.values_ = kernel.amplitude * kronecker_sample(factors, std::move(z));
    return out;
  }

  const std::uint64_t need = static_cast<std::uint64_t>(total) *
                             static_cast<std::uint64_t>(total) * sizeof(double);
  if (need > opts.memory_budget_bytes) {
    throw BudgetError(
        "sample_prior_realization: dense grid covariance exceeds the memory budget; "
        "reduce grid_per_dim for non-separable kernels");
  }
  Eigen::MatrixXd nodes(total, d);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    for (Eigen::Index k = d - 1; k >= 0; --k) {
      nodes(i, k) = out.axes_[k][rem % grid_per_dim];
      rem /= grid_per_dim;
    }
  }
  Eigen::MatrixXd gram = kernel_matrix(kernel, nodes, nodes);
  const Eigen::MatrixXd l =
      chol_with_jitter(std::move(gram), kernel.amplitude * kernel.amplitude, opts);
  out.values_ = l * z;
  return out;
}

}  // namespace glws
