#include "glws/gp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "glws/errors.hpp"

namespace glws {

namespace {

constexpr Eigen::Index kPredictBlock = 8192;

// Closest pair of rows, reported when factorization fails.
std::pair<Eigen::Index, Eigen::Index> closest_rows(const Eigen::MatrixXd& x) {
  Eigen::Index best_i = 0, best_j = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      const double d = (x.row(i) - x.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        best_i = i;
        best_j = j;
      }
    }
  return {best_i, best_j};
}

}  // namespace

Posterior::Posterior(Dataset data, KernelConfig kernel, PosteriorOptions opts)
    : data_(std::move(data)), kernel_(std::move(kernel)), opts_(opts) {
  kernel_.validate();
  if (data_.dim() != kernel_.dim())
    throw InvalidArgumentError("Posterior: dataset/kernel dimension mismatch");
  factorize();
}

void Posterior::reserve(Eigen::Index capacity) {
  if (chol_.rows() >= capacity) return;
  Eigen::Index cap = std::max<Eigen::Index>(16, chol_.rows());
  while (cap < capacity) cap *= 2;
  const Eigen::Index keep = std::min(n_, chol_.rows());
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(cap, cap);
  chol.topLeftCorner(keep, keep) = chol_.topLeftCorner(keep, keep);
  chol_.swap(chol);
  alpha_.conservativeResize(cap);
}

void Posterior::factorize() {
  n_ = data_.size();
  reserve(n_);
  const double tau2 = prior_variance();
  Eigen::MatrixXd gram;
  if (n_ > 0) gram = kernel_matrix(kernel_, data_.inputs(), data_.inputs());
  for (double rel = opts_.jitter_rel; rel <= opts_.jitter_rel_max * (1.0 + 1e-12);
       rel *= 10.0) {
    jitter_ = rel * tau2;
    if (n_ == 0) return;
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += jitter_;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
      chol_.topLeftCorner(n_, n_) = llt.matrixL();
      alpha_.head(n_) = llt.solve(data_.responses());
      return;
    }
  }
  const auto [i, j] = closest_rows(data_.inputs());
  std::ostringstream msg;
  msg << "Posterior: covariance factorization failed at maximum jitter; "
      << "closest rows " << i << " and " << j;
  throw SingularCovarianceError(msg.str(), i, j);
}

Eigen::VectorXd Posterior::solve_lower(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return chol_lower().triangularView<Eigen::Lower>().solve(v);
}

Eigen::VectorXd Posterior::solve(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  Eigen::VectorXd w = solve_lower(v);
  return chol_lower().transpose().triangularView<Eigen::Upper>().solve(w);
}

void Posterior::predict(const Eigen::Ref<const Eigen::MatrixXd>& queries,
                        Eigen::VectorXd& means, Eigen::VectorXd& vars) const {
  if (queries.cols() != dim())
    throw InvalidArgumentError("Posterior::predict: query dimension mismatch");
  if (!queries.allFinite())
    throw InvalidArgumentError("Posterior::predict: non-finite query");
  const Eigen::Index m = queries.rows();
  const double tau2 = prior_variance();
  means.resize(m);
  vars.resize(m);
  if (n_ == 0) {
    means.setZero();
    vars.setConstant(tau2);
    return;
  }
  const double var_cap = tau2 + jitter_;
  for (Eigen::Index start = 0; start < m; start += kPredictBlock) {
    const Eigen::Index len = std::min(kPredictBlock, m - start);
    Eigen::MatrixXd kxq = kernel_matrix(kernel_, data_.inputs(), queries.middleRows(start, len));
    means.segment(start, len) = kxq.transpose() * alpha();
    chol_lower().triangularView<Eigen::Lower>().solveInPlace(kxq);
    vars.segment(start, len) =
        (tau2 - kxq.colwise().squaredNorm().transpose().array()).cwiseMax(0.0).cwiseMin(var_cap);
  }
}

std::pair<double, double> Posterior::predict_one(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd means, vars;
  predict(x.transpose(), means, vars);
  return {means[0], vars[0]};
}

void Posterior::append(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  const double tau2 = prior_variance();
  Eigen::VectorXd b(n_);
  if (n_ > 0) {
    const Eigen::VectorXd k = kernel_column(kernel_, data_.inputs(), x);
    b = solve_lower(k);
  }
  const double schur = tau2 + jitter_ - b.squaredNorm();
  if (!(schur > 0.0))
    throw DuplicatePointError("Posterior::append: new row is numerically dependent");
  data_.append(x, y);
  reserve(n_ + 1);
  chol_.block(n_, 0, 1, n_) = b.transpose();
  chol_(n_, n_) = std::sqrt(schur);
  n_ += 1;
  // alpha = (K + jitter I)^{-1} y through the extended factor.
  Eigen::VectorXd w = chol_lower().triangularView<Eigen::Lower>().solve(data_.responses());
  alpha_.head(n_) = chol_lower().transpose().triangularView<Eigen::Upper>().solve(w);
}

PoolCache::PoolCache(const Posterior& state, Eigen::MatrixXd points,
                     Eigen::Index max_data_size, PoolCacheOptions opts,
                     std::int64_t generation)
    : points_(std::move(points)), generation_(generation) {
  if (points_.cols() != state.dim())
    throw InvalidArgumentError("PoolCache: pool dimension mismatch");
  if (max_data_size < state.size()) max_data_size = state.size();
  const std::uint64_t need = static_cast<std::uint64_t>(points_.rows()) *
                             static_cast<std::uint64_t>(max_data_size) * sizeof(double);
  if (need > opts.memory_budget_bytes) {
    std::ostringstream msg;
    msg << "PoolCache: cross-covariance block needs " << need << " bytes ("
        << points_.rows() << " x " << max_data_size << ") but the budget is "
        << opts.memory_budget_bytes;
    throw BudgetError(msg.str());
  }
  cross_.resize(points_.rows(), max_data_size);
  cols_ = state.size();
  if (cols_ > 0)
    cross_.leftCols(cols_) = kernel_matrix(state.kernel(), points_, state.data().inputs());
  state.predict(points_, means_, vars_);
}

void recursive_append(Posterior& state, std::span<PoolCache* const> caches,
                      const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  if (x.size() != state.dim())
    throw InvalidArgumentError("recursive_append: dimension mismatch");
  if (!x.allFinite() || !std::isfinite(y))
    throw InvalidArgumentError("recursive_append: non-finite sample");
  const double tau2 = state.prior_variance();
  const Eigen::Index n = state.size();

  Eigen::VectorXd b(n), t(n);
  double mean_x = 0.0;
  if (n > 0) {
    const Eigen::VectorXd k = kernel_column(state.kernel(), state.data().inputs(), x);
    b = state.solve_lower(k);
    mean_x = k.dot(state.alpha());
  }
  const double var_x = tau2 - b.squaredNorm();
  if (var_x <= kAppendVarFloorRel * tau2)
    throw DuplicatePointError("recursive_append: point already interpolated");
  // Schur complement of the extended covariance; matches the new diagonal
  // Cholesky entry squared, so cache updates stay consistent with a rebuild.
  const double schur = var_x + state.jitter();
  if (n > 0) {
    // Regrouped solve: K^{-1} k as an n-vector, then one mat-vec per cache.
    t = state.chol_lower().transpose().triangularView<Eigen::Upper>().solve(b);
  }
  const double resid = y - mean_x;

  // Stage every cache update before mutating anything.
  std::vector<Eigen::VectorXd> cov(caches.size());
  std::vector<Eigen::VectorXd> k_pool(caches.size());
  for (std::size_t c = 0; c < caches.size(); ++c) {
    PoolCache& cache = *caches[c];
    if (cache.cols_ != n)
      throw StalenessError("recursive_append: cache column count does not match dataset");
    if (cache.cols_ >= cache.cross_.cols())
      throw BudgetError("recursive_append: cache is at its reserved capacity");
    k_pool[c] = kernel_column(state.kernel(), cache.points_, x);
    if (n > 0)
      cov[c] = k_pool[c] - cache.cross_.topLeftCorner(cache.points_.rows(), n) * t;
    else
      cov[c] = k_pool[c];
    const Eigen::ArrayXd updated =
        cache.vars_.array() - cov[c].array().square() / schur;
    if ((updated < -kVarDegradationRel * tau2).any())
      throw NumericalDegradationError(
          "recursive_append: updated variance fell below the clamp band; rebuild required");
  }

  for (std::size_t c = 0; c < caches.size(); ++c) {
    PoolCache& cache = *caches[c];
    cache.means_ += cov[c] * (resid / schur);
    cache.vars_ = (cache.vars_.array() - cov[c].array().square() / schur).cwiseMax(0.0);
    cache.cross_.col(cache.cols_) = k_pool[c];
    cache.cols_ += 1;
    cache.generation_ += 1;
  }
  state.append(x, y);
}

}  // namespace glws
