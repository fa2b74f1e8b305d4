#pragma once

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

namespace glws {

/// One-dimensional response-PDF estimate on a uniform grid. The stored
/// log-density is floored at log(floor); [support_lo, support_hi] is the
/// index range where the pre-floor density was at or above the floor.
struct DensityEstimate {
  Eigen::VectorXd grid;         // strictly increasing, uniform
  Eigen::VectorXd log_density;  // floored
  double bandwidth = 0.0;
  double floor = 1e-16;
  Eigen::Index support_lo = 0;
  Eigen::Index support_hi = 0;
  std::int64_t generation = -1;  // surrogate generation tag, -1 = untagged

  /// Log-linear interpolation on the grid; log(floor) outside it.
  double log_pdf_at(double value) const;
  double pdf_at(double value) const;
  double support_lo_value() const { return grid[support_lo]; }
  double support_hi_value() const { return grid[support_hi]; }
  /// Trapezoid integral of the stored density over the grid.
  double integral() const;
  void write_csv(std::ostream& os) const;
};

/// Gaussian KDE with Scott's-rule bandwidth (h = sigma * m^(-1/5)) on a
/// uniform grid spanning [min - 3h, max + 3h]. Large sample sets are
/// linearly binned before evaluation; small ones are summed exactly.
DensityEstimate estimate_pdf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                             int grid_size = 400, double floor = 1e-16);

/// Integral of |log p_a - log p_b| over the union of the two supports,
/// trapezoid rule on a common uniform grid. Both estimates must share the
/// same floor.
double log_pdf_error(const DensityEstimate& a, const DensityEstimate& b,
                     int quadrature_grid = 400);

}  // namespace glws
