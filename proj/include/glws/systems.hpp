#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glws/distributions.hpp"
#include "glws/kde.hpp"
#include "glws/kl.hpp"
#include "glws/realization.hpp"

namespace glws {

// ---------------------------------------------------------------------------
// Stochastic oscillator: two-DOF system under a Gaussian forcing reduced to
// two KL inputs; the response is the time-mean of the state over the window.

struct OscillatorParams {
  double damping = 1.5;          // delta
  double stiffness = 1.0;        // alpha
  double cubic = 0.1;            // beta
  double u1 = 0.5;
  double u2 = 1.5;
  double forcing_sigma2 = 0.1;
  double forcing_corr_len = 4.0;
  double t_end = 25.0;
  double dt = 0.01;
  int kl_grid = 201;
  bool sqrt_convention = false;  // scale KL terms by sqrt(lambda) instead of lambda
  double divergence_limit = 1e6;
};

/// Piecewise restoring force: linear, plateau, then cubic hardening; odd in u.
double oscillator_restoring_force(const OscillatorParams& p, double u);

class StochasticOscillator {
 public:
  explicit StochasticOscillator(OscillatorParams params = {});
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  const KLExpansion& kl() const { return kl_; }
  const OscillatorParams& params() const { return params_; }

 private:
  OscillatorParams params_;
  KLExpansion kl_;
  Eigen::MatrixXd stage_basis_;  // (2*steps+1) x 2, KL coefficients on the half-step grid
  Eigen::Index steps_ = 0;
};

// ---------------------------------------------------------------------------
// SIR pandemic-spike model with a KL-expanded infection rate; the response is
// the infected count at the end of the window.

struct SirParams {
  double immunity_loss = 0.0;   // delta
  double recovery = 0.1;        // gamma
  double beta0 = 3e-9;
  double phi0 = 2.55;
  double forcing_sigma2 = 0.1;
  double forcing_corr_len = 4.0;
  double s0 = 1e8;
  double i0 = 50.0;
  double r0 = 0.0;
  double t_end = 20.0;
  double dt = 0.01;
  int kl_grid = 201;
  bool sqrt_convention = false;
  bool clamp_beta = true;  // negative infection rates are unphysical
  double divergence_limit = 1e12;
};

class SirModel {
 public:
  explicit SirModel(SirParams params = {});
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Full trajectory sampled at every solver step: columns t, S, I, R.
  Eigen::MatrixXd trajectory(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  const KLExpansion& kl() const { return kl_; }
  const SirParams& params() const { return params_; }

 private:
  template <typename Observer>
  double integrate(const Eigen::Ref<const Eigen::VectorXd>& x, Observer&& obs) const;
  SirParams params_;
  KLExpansion kl_;
  Eigen::MatrixXd stage_basis_;
  Eigen::Index steps_ = 0;
};

// ---------------------------------------------------------------------------
// Ship roll in a random sea: nonlinear roll equation forced by a Gaussian
// wave group; the response is the maximum absolute roll over ten periods.

struct ShipParams {
  double lin_damping = 0.1;     // alpha_1
  double quad_damping = 0.1;    // alpha_2
  double lin_stiffness = 1.0;   // beta_1
  double cubic_stiffness = 0.1; // beta_2
  double parametric_gain = 1.0; // epsilon_1
  double direct_gain = 1.0;     // epsilon_2
  double period_mean = 15.0;    // T_p; input T ~ N(T_p, (T_p/4)^2)
  double heading_mean = M_PI / 2.0;  // gamma_p
  int steps_per_period = 200;
  int window_periods = 10;
  double period_floor = 1.0;    // truncation of the T marginal
  bool half_space = true;       // restrict gamma <= gamma_p by symmetry
  double divergence_limit = 1e6;
};

class ShipRoll {
 public:
  explicit ShipRoll(ShipParams params = {});
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;  // x = (T, gamma)
  const ShipParams& params() const { return params_; }
  /// The (T, gamma) input distribution with the documented truncations.
  InputDistribution input_distribution() const;

 private:
  ShipParams params_;
};

// ---------------------------------------------------------------------------
// Synthetic responses drawn from a GP prior (amplitude 2, unit lengthscales).

struct SyntheticFunction {
  GridRealization realization;
  KernelConfig kernel;
  std::uint64_t seed = 0;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return realization(x);
  }
};

SyntheticFunction make_synthetic_function(KernelFamily family, int d, std::uint64_t seed,
                                          int grid_per_dim = 0 /* 0 = default */,
                                          double box_half_width = 6.0);

// ---------------------------------------------------------------------------
// Ground truth: the response evaluated on an i.i.d. Monte-Carlo input set,
// plus the density estimate of those responses. The same input set serves
// surrogate-PDF estimation across a whole run.

struct GroundTruth {
  Eigen::MatrixXd inputs;     // m x d
  Eigen::VectorXd responses;  // m
  DensityEstimate pdf;
};

GroundTruth ground_truth_pdf(const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>& f,
                             const InputDistribution& dist, Eigen::Index m,
                             std::uint64_t seed, int grid_size = 400,
                             double floor = 1e-16,
                             const std::string& cache_dir = "",
                             const std::string& cache_key = "");

// ---------------------------------------------------------------------------
// Registry tying system ids to their input distributions and responses.

struct BenchmarkSystem {
  std::string id;
  Eigen::Index dim = 0;
  InputDistribution input;
  std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)> response;
  std::uint64_t params_hash = 0;  // keys the ground-truth cache
};

/// Builds a registered system. `params_json` carries optional overrides of
/// the system's defaults as a flat JSON object (serialized string to keep
/// this header light); synthetic systems consume `function_seed`.
BenchmarkSystem build_system(const std::string& id, const std::string& params_json,
                             std::uint64_t function_seed);

std::vector<std::pair<std::string, std::string>> list_systems();

}  // namespace glws
