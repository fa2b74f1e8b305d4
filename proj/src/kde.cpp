#include "glws/kde.hpp"

#include <cmath>
#include <ostream>

#include "glws/errors.hpp"
#include "glws/io.hpp"

namespace glws {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr Eigen::Index kBinCount = 2048;
constexpr Eigen::Index kDirectThreshold = 4096;
constexpr double kTailCut = 9.5;  // kernel contributions beyond this many
                                  // bandwidths are below any usable floor

}  // namespace

double DensityEstimate::log_pdf_at(double value) const {
  if (!std::isfinite(value)) throw InvalidArgumentError("log_pdf_at: non-finite value");
  const double log_floor = std::log(floor);
  const Eigen::Index g = grid.size();
  if (value < grid[0] || value > grid[g - 1]) return log_floor;
  const double step = (grid[g - 1] - grid[0]) / static_cast<double>(g - 1);
  double u = (value - grid[0]) / step;
  Eigen::Index i = std::min(static_cast<Eigen::Index>(u), g - 2);
  const double theta = u - static_cast<double>(i);
  return (1.0 - theta) * log_density[i] + theta * log_density[i + 1];
}

double DensityEstimate::pdf_at(double value) const { return std::exp(log_pdf_at(value)); }

double DensityEstimate::integral() const {
  const double step = (grid[grid.size() - 1] - grid[0]) / static_cast<double>(grid.size() - 1);
  const Eigen::ArrayXd dens = log_density.array().exp();
  return step * (dens.sum() - 0.5 * dens[0] - 0.5 * dens[dens.size() - 1]);
}

void DensityEstimate::write_csv(std::ostream& os) const {
  os << "grid,log_density\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    os << format_double(grid[i]) << ',' << format_double(log_density[i]) << '\n';
}

DensityEstimate estimate_pdf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                             int grid_size, double floor) {
  const Eigen::Index m = samples.size();
  if (m < 100) throw InvalidArgumentError("estimate_pdf: need at least 100 samples");
  if (!samples.allFinite()) throw InvalidArgumentError("estimate_pdf: non-finite samples");
  if (!(floor > 0.0)) throw InvalidArgumentError("estimate_pdf: floor must be positive");
  if (grid_size < 16) throw InvalidArgumentError("estimate_pdf: grid too small");

  const double mean = samples.mean();
  const double sd = std::sqrt((samples.array() - mean).square().sum() /
                              static_cast<double>(m - 1));
  if (!(sd > 0.0)) throw Error("estimate_pdf: all samples identical (zero bandwidth)");
  const double h = sd * std::pow(static_cast<double>(m), -0.2);

  const double lo = samples.minCoeff() - 3.0 * h;
  const double hi = samples.maxCoeff() + 3.0 * h;

  DensityEstimate out;
  out.bandwidth = h;
  out.floor = floor;
  out.grid = Eigen::VectorXd::LinSpaced(grid_size, lo, hi);

  // Mass locations: the samples themselves when few, otherwise linear
  // binning onto a fine internal mesh (first-order binning error cancels;
  // the residual is far below the estimator's own bias).
  Eigen::VectorXd centers, weights;
  if (m <= kDirectThreshold) {
    centers = samples;
    weights = Eigen::VectorXd::Ones(m);
  } else {
    centers = Eigen::VectorXd::LinSpaced(kBinCount, lo, hi);
    weights = Eigen::VectorXd::Zero(kBinCount);
    const double inv_step = static_cast<double>(kBinCount - 1) / (hi - lo);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double u = (samples[i] - lo) * inv_step;
      const Eigen::Index j = std::min(static_cast<Eigen::Index>(u), kBinCount - 2);
      const double theta = u - static_cast<double>(j);
      weights[j] += 1.0 - theta;
      weights[j + 1] += theta;
    }
  }

  const double norm = kInvSqrt2Pi / (static_cast<double>(m) * h);
  const double inv_h = 1.0 / h;
  const double cut = kTailCut * h;
  Eigen::VectorXd density(grid_size);
  for (Eigen::Index g = 0; g < grid_size; ++g) {
    const double x = out.grid[g];
    double acc = 0.0;
    for (Eigen::Index b = 0; b < centers.size(); ++b) {
      const double dxv = x - centers[b];
      if (dxv > cut || dxv < -cut) continue;
      const double zz = dxv * inv_h;
      acc += weights[b] * std::exp(-0.5 * zz * zz);
    }
    density[g] = norm * acc;
  }

  out.support_lo = -1;
  out.support_hi = -1;
  out.log_density.resize(grid_size);
  const double log_floor = std::log(floor);
  for (Eigen::Index g = 0; g < grid_size; ++g) {
    if (density[g] >= floor) {
      if (out.support_lo < 0) out.support_lo = g;
      out.support_hi = g;
      out.log_density[g] = std::log(density[g]);
    } else {
      out.log_density[g] = log_floor;
    }
  }
  if (out.support_lo < 0)
    throw Error("estimate_pdf: density below the floor everywhere");
  return out;
}

double log_pdf_error(const DensityEstimate& a, const DensityEstimate& b,
                     int quadrature_grid) {
  if (a.floor != b.floor)
    throw InvalidArgumentError("log_pdf_error: estimates use different floors");
  if (quadrature_grid < 2) throw InvalidArgumentError("log_pdf_error: grid too small");
  const double lo = std::min(a.support_lo_value(), b.support_lo_value());
  const double hi = std::max(a.support_hi_value(), b.support_hi_value());
  if (!(hi > lo)) throw Error("log_pdf_error: empty integration domain");
  const double step = (hi - lo) / static_cast<double>(quadrature_grid - 1);
  double acc = 0.0;
  for (int i = 0; i < quadrature_grid; ++i) {
    const double f = lo + step * static_cast<double>(i);
    const double v = std::abs(a.log_pdf_at(f) - b.log_pdf_at(f));
    acc += (i == 0 || i == quadrature_grid - 1) ? 0.5 * v : v;
  }
  return acc * step;
}

}  // namespace glws
