#include "glws/systems.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "glws/errors.hpp"
#include "glws/io.hpp"
#include "glws/ode.hpp"
#include "glws/rng.hpp"

namespace glws {

namespace {

using nlohmann::json;

Eigen::VectorXd half_step_times(double t_end, double dt, Eigen::Index steps) {
  Eigen::VectorXd t(2 * steps + 1);
  for (Eigen::Index j = 0; j < t.size(); ++j) t[j] = 0.5 * dt * static_cast<double>(j);
  t[t.size() - 1] = t_end;
  return t;
}

void check_input_2d(const Eigen::Ref<const Eigen::VectorXd>& x, const char* who) {
  if (x.size() != 2) throw InvalidArgumentError(std::string(who) + ": input must be 2-D");
  if (!x.allFinite()) throw InvalidArgumentError(std::string(who) + ": non-finite input");
}

}  // namespace

// --------------------------------------------------------------------------
// Oscillator

double oscillator_restoring_force(const OscillatorParams& p, double u) {
  const double au = std::abs(u);
  const double sign = u < 0.0 ? -1.0 : 1.0;
  if (au <= p.u1) return p.stiffness * u;
  if (au <= p.u2) return sign * p.stiffness * p.u1;
  const double excess = au - p.u2;
  return sign * (p.stiffness * p.u1 + p.cubic * excess * excess * excess);
}

StochasticOscillator::StochasticOscillator(OscillatorParams params)
    : params_(params),
      kl_(kl_expand(params.forcing_sigma2, params.forcing_corr_len, 0.0, params.t_end,
                    params.kl_grid, 2)) {
  steps_ = static_cast<Eigen::Index>(std::llround(params_.t_end / params_.dt));
  stage_basis_ = kl_.basis_at(half_step_times(params_.t_end, params_.dt, steps_),
                              params_.sqrt_convention);
}

double StochasticOscillator::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_input_2d(x, "StochasticOscillator");
  const Eigen::VectorXd forcing = stage_basis_ * x;  // xi(t) on the half-step grid
  std::array<double, 2> state{0.0, 0.0};             // u, du/dt
  const double dt = params_.dt;
  double integral = 0.5 * state[0];  // trapezoid accumulation of u
  for (Eigen::Index k = 0; k < steps_; ++k) {
    const double* f3 = forcing.data() + 2 * k;
    rk4_step<2>(state, dt, [&](const std::array<double, 2>& s, std::array<double, 2>& ds,
                               int stage) {
      ds[0] = s[1];
      ds[1] = f3[stage] - params_.damping * s[1] - oscillator_restoring_force(params_, s[0]);
    });
    if (std::abs(state[0]) > params_.divergence_limit) {
      std::ostringstream msg;
      msg << "StochasticOscillator: trajectory diverged at x = (" << x[0] << ", " << x[1]
          << ")";
      throw DivergenceError(msg.str());
    }
    integral += (k + 1 == steps_) ? 0.5 * state[0] : state[0];
  }
  return integral * dt / params_.t_end;
}

// --------------------------------------------------------------------------
// SIR

SirModel::SirModel(SirParams params)
    : params_(params),
      kl_(kl_expand(params.forcing_sigma2, params.forcing_corr_len, 0.0, params.t_end,
                    params.kl_grid, 2)) {
  steps_ = static_cast<Eigen::Index>(std::llround(params_.t_end / params_.dt));
  stage_basis_ = kl_.basis_at(half_step_times(params_.t_end, params_.dt, steps_),
                              params_.sqrt_convention);
}

template <typename Observer>
double SirModel::integrate(const Eigen::Ref<const Eigen::VectorXd>& x,
                           Observer&& observe) const {
  check_input_2d(x, "SirModel");
  Eigen::VectorXd beta = params_.beta0 * ((stage_basis_ * x).array() + params_.phi0);
  if (params_.clamp_beta) beta = beta.cwiseMax(0.0);
  std::array<double, 3> state{params_.s0, params_.i0, params_.r0};
  const double dt = params_.dt;
  observe(0.0, state);
  for (Eigen::Index k = 0; k < steps_; ++k) {
    const double* b3 = beta.data() + 2 * k;
    rk4_step<3>(state, dt, [&](const std::array<double, 3>& s, std::array<double, 3>& ds,
                               int stage) {
      const double infection = b3[stage] * s[1] * s[0];
      ds[0] = -infection + params_.immunity_loss * s[2];
      ds[1] = infection - params_.recovery * s[1];
      ds[2] = params_.recovery * s[1] - params_.immunity_loss * s[2];
    });
    if (!std::isfinite(state[1]) || std::abs(state[1]) > params_.divergence_limit)
      throw DivergenceError("SirModel: trajectory diverged");
    observe(dt * static_cast<double>(k + 1), state);
  }
  return state[1];
}

double SirModel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return integrate(x, [](double, const std::array<double, 3>&) {});
}

Eigen::MatrixXd SirModel::trajectory(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::MatrixXd out(steps_ + 1, 4);
  Eigen::Index row = 0;
  integrate(x, [&](double t, const std::array<double, 3>& s) {
    out(row, 0) = t;
    out(row, 1) = s[0];
    out(row, 2) = s[1];
    out(row, 3) = s[2];
    ++row;
  });
  return out;
}

// --------------------------------------------------------------------------
// Ship roll

ShipRoll::ShipRoll(ShipParams params) : params_(params) {
  if (!(params_.period_floor > 0.0))
    throw InvalidArgumentError("ShipRoll: period floor must be positive");
}

InputDistribution ShipRoll::input_distribution() const {
  const double t_sd = params_.period_mean / 4.0;
  const double g_sd = params_.heading_mean / 4.0;
  std::vector<Marginal> m;
  m.push_back(Marginal::truncated_normal(params_.period_mean, t_sd, params_.period_floor,
                                         std::numeric_limits<double>::infinity()));
  if (params_.half_space)
    m.push_back(Marginal::truncated_normal(params_.heading_mean, g_sd,
                                           -std::numeric_limits<double>::infinity(),
                                           params_.heading_mean));
  else
    m.push_back(Marginal::normal(params_.heading_mean, g_sd));
  return InputDistribution(std::move(m));
}

double ShipRoll::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_input_2d(x, "ShipRoll");
  const double period = x[0];
  const double heading = x[1];
  if (!(period > 0.0)) throw InvalidArgumentError("ShipRoll: wave period must be positive");

  const double dt = period / static_cast<double>(params_.steps_per_period);
  const Eigen::Index steps =
      static_cast<Eigen::Index>(params_.steps_per_period) * params_.window_periods;
  const double sin_g = std::sin(heading);
  const double cos_g = std::cos(heading);
  const double omega = 2.0 * M_PI / period;
  const double center = 5.0 * period;
  const double env_width = 2.0 * period;
  auto elevation = [&](double t) {
    const double z = (t - center) / env_width;
    return std::exp(-0.5 * z * z) * std::sin(omega * t);
  };

  std::array<double, 2> state{0.0, 0.0};  // roll, roll rate
  std::vector<double> roll(steps + 1), rate(steps + 1);
  roll[0] = 0.0;
  rate[0] = 0.0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double t0 = dt * static_cast<double>(k);
    const double t_stage[3] = {t0, t0 + 0.5 * dt, t0 + dt};
    rk4_step<2>(state, dt, [&](const std::array<double, 2>& s, std::array<double, 2>& ds,
                               int stage) {
      const double eta = elevation(t_stage[stage]);
      ds[0] = s[1];
      ds[1] = params_.direct_gain * cos_g * eta - params_.lin_damping * s[1] -
              params_.quad_damping * s[1] * std::abs(s[1]) -
              (params_.lin_stiffness + params_.parametric_gain * sin_g * eta) * s[0] -
              params_.cubic_stiffness * s[0] * s[0] * s[0];
    });
    if (std::abs(state[0]) > params_.divergence_limit)
      throw DivergenceError("ShipRoll: trajectory diverged");
    roll[k + 1] = state[0];
    rate[k + 1] = state[1];
  }

  // Peaks fall between grid points; the raw grid max converges too slowly in
  // the step size. Refine each interval with the cubic Hermite interpolant
  // (values and derivatives are both available) and take its extrema.
  double peak = 0.0;
  for (Eigen::Index k = 0; k <= steps; ++k) peak = std::max(peak, std::abs(roll[k]));
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double p0 = roll[k], p1 = roll[k + 1];
    const double m0 = rate[k] * dt, m1 = rate[k + 1] * dt;
    // Hermite cubic h(s) = a s^3 + b s^2 + c s + d on s in [0,1].
    const double a = 2 * p0 - 2 * p1 + m0 + m1;
    const double b = -3 * p0 + 3 * p1 - 2 * m0 - m1;
    const double c = m0;
    const double disc = b * b - 3.0 * a * c;
    if (disc <= 0.0) continue;
    const double root = std::sqrt(disc);
    for (const double s : {(-b + root) / (3.0 * a), (-b - root) / (3.0 * a)}) {
      if (!(s > 0.0 && s < 1.0)) continue;
      const double v = ((a * s + b) * s + c) * s + p0;
      peak = std::max(peak, std::abs(v));
    }
  }
  return peak;
}

// --------------------------------------------------------------------------
// Synthetic functions

SyntheticFunction make_synthetic_function(KernelFamily family, int d, std::uint64_t seed,
                                          int grid_per_dim, double box_half_width) {
  if (d != 2 && d != 3)
    throw InvalidArgumentError("make_synthetic_function: d must be 2 or 3");
  if (grid_per_dim == 0) {
    grid_per_dim = (d == 2) ? 80 : 40;
    // Dense factorization of a non-separable kernel on a 40^3 grid is out of
    // reach; fall back to a grid the budget admits.
    if (family == KernelFamily::Matern && d == 3) grid_per_dim = 20;
  }
  KernelConfig kernel;
  kernel.family = family;
  kernel.amplitude = 2.0;
  kernel.lengthscales = Eigen::VectorXd::Ones(d);
  kernel.smoothness = 1.5;
  SyntheticFunction out{
      sample_prior_realization(kernel, Box::cube(d, box_half_width), grid_per_dim, seed),
      kernel, seed};
  return out;
}

// --------------------------------------------------------------------------
// Ground truth with on-disk cache

namespace {

constexpr std::uint64_t kCacheMagic = 0x47545330424c5747ull;  // "GWLB0STG"

bool load_ground_truth(const std::string& path, Eigen::Index m, Eigen::Index d,
                       Eigen::MatrixXd& inputs, Eigen::VectorXd& responses) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::uint64_t magic = 0, rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || magic != kCacheMagic || rows != static_cast<std::uint64_t>(m) ||
      cols != static_cast<std::uint64_t>(d))
    return false;
  inputs.resize(m, d);
  responses.resize(m);
  in.read(reinterpret_cast<char*>(inputs.data()),
          static_cast<std::streamsize>(sizeof(double) * m * d));
  in.read(reinterpret_cast<char*>(responses.data()),
          static_cast<std::streamsize>(sizeof(double) * m));
  return static_cast<bool>(in);
}

void store_ground_truth(const std::string& path, const Eigen::MatrixXd& inputs,
                        const Eigen::VectorXd& responses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return;  // caching is best-effort
  const std::uint64_t magic = kCacheMagic;
  const std::uint64_t rows = static_cast<std::uint64_t>(inputs.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(inputs.cols());
  out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(inputs.data()),
            static_cast<std::streamsize>(sizeof(double) * inputs.size()));
  out.write(reinterpret_cast<const char*>(responses.data()),
            static_cast<std::streamsize>(sizeof(double) * responses.size()));
}

}  // namespace

GroundTruth ground_truth_pdf(
    const std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>& f,
    const InputDistribution& dist, Eigen::Index m, std::uint64_t seed, int grid_size,
    double floor, const std::string& cache_dir, const std::string& cache_key) {
  if (m < 100) throw InvalidArgumentError("ground_truth_pdf: m too small");
  GroundTruth gt;
  std::string cache_path;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    std::ostringstream name;
    name << "gt_" << cache_key << '_' << std::hex << seed << std::dec << '_' << m << ".bin";
    cache_path = (std::filesystem::path(cache_dir) / name.str()).string();
    if (load_ground_truth(cache_path, m, dist.dim(), gt.inputs, gt.responses)) {
      gt.pdf = estimate_pdf(gt.responses, grid_size, floor);
      return gt;
    }
  }
  Rng rng(derive_seed(seed, 0x67740001));
  gt.inputs = dist.sample_matrix(m, rng);
  gt.responses.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) gt.responses[i] = f(gt.inputs.row(i).transpose());
  if (!cache_path.empty()) store_ground_truth(cache_path, gt.inputs, gt.responses);
  gt.pdf = estimate_pdf(gt.responses, grid_size, floor);
  return gt;
}

// --------------------------------------------------------------------------
// Registry

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json parse_params(const std::string& params_json) {
  if (params_json.empty()) return json::object();
  json j = json::parse(params_json);
  if (!j.is_object()) throw InvalidArgumentError("system params must be a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& id) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok)
      throw InvalidArgumentError("unknown parameter '" + it.key() + "' for system " + id);
  }
}

OscillatorParams oscillator_params_from(const json& j) {
  OscillatorParams p;
  reject_unknown(j,
                 {"damping", "stiffness", "cubic", "u1", "u2", "forcing_sigma2",
                  "forcing_corr_len", "t_end", "dt", "kl_grid", "sqrt_convention",
                  "divergence_limit"},
                 "oscillator");
  maybe(j, "damping", p.damping);
  maybe(j, "stiffness", p.stiffness);
  maybe(j, "cubic", p.cubic);
  maybe(j, "u1", p.u1);
  maybe(j, "u2", p.u2);
  maybe(j, "forcing_sigma2", p.forcing_sigma2);
  maybe(j, "forcing_corr_len", p.forcing_corr_len);
  maybe(j, "t_end", p.t_end);
  maybe(j, "dt", p.dt);
  maybe(j, "kl_grid", p.kl_grid);
  maybe(j, "sqrt_convention", p.sqrt_convention);
  maybe(j, "divergence_limit", p.divergence_limit);
  return p;
}

SirParams sir_params_from(const json& j) {
  SirParams p;
  reject_unknown(j,
                 {"immunity_loss", "recovery", "beta0", "phi0", "forcing_sigma2",
                  "forcing_corr_len", "s0", "i0", "r0", "t_end", "dt", "kl_grid",
                  "sqrt_convention", "clamp_beta", "divergence_limit"},
                 "sir");
  maybe(j, "immunity_loss", p.immunity_loss);
  maybe(j, "recovery", p.recovery);
  maybe(j, "beta0", p.beta0);
  maybe(j, "phi0", p.phi0);
  maybe(j, "forcing_sigma2", p.forcing_sigma2);
  maybe(j, "forcing_corr_len", p.forcing_corr_len);
  maybe(j, "s0", p.s0);
  maybe(j, "i0", p.i0);
  maybe(j, "r0", p.r0);
  maybe(j, "t_end", p.t_end);
  maybe(j, "dt", p.dt);
  maybe(j, "kl_grid", p.kl_grid);
  maybe(j, "sqrt_convention", p.sqrt_convention);
  maybe(j, "clamp_beta", p.clamp_beta);
  maybe(j, "divergence_limit", p.divergence_limit);
  return p;
}

ShipParams ship_params_from(const json& j) {
  ShipParams p;
  reject_unknown(j,
                 {"lin_damping", "quad_damping", "lin_stiffness", "cubic_stiffness",
                  "parametric_gain", "direct_gain", "period_mean", "heading_mean",
                  "steps_per_period", "window_periods", "period_floor", "half_space",
                  "divergence_limit"},
                 "ship");
  maybe(j, "lin_damping", p.lin_damping);
  maybe(j, "quad_damping", p.quad_damping);
  maybe(j, "lin_stiffness", p.lin_stiffness);
  maybe(j, "cubic_stiffness", p.cubic_stiffness);
  maybe(j, "parametric_gain", p.parametric_gain);
  maybe(j, "direct_gain", p.direct_gain);
  maybe(j, "period_mean", p.period_mean);
  maybe(j, "heading_mean", p.heading_mean);
  maybe(j, "steps_per_period", p.steps_per_period);
  maybe(j, "window_periods", p.window_periods);
  maybe(j, "period_floor", p.period_floor);
  maybe(j, "half_space", p.half_space);
  maybe(j, "divergence_limit", p.divergence_limit);
  return p;
}

std::uint64_t hash_params(const std::string& id, const json& j, std::uint64_t extra) {
  std::ostringstream os;
  os << id << '|' << j.dump() << '|' << extra;
  return fnv1a(os.str());
}

}  // namespace

BenchmarkSystem build_system(const std::string& id, const std::string& params_json,
                             std::uint64_t function_seed) {
  const json j = parse_params(params_json);
  if (id == "oscillator") {
    auto sys = std::make_shared<StochasticOscillator>(oscillator_params_from(j));
    return {id, 2, InputDistribution::standard_normal(2),
            [sys](const Eigen::Ref<const Eigen::VectorXd>& x) { return (*sys)(x); },
            hash_params(id, j, 0)};
  }
  if (id == "sir") {
    auto sys = std::make_shared<SirModel>(sir_params_from(j));
    return {id, 2, InputDistribution::standard_normal(2),
            [sys](const Eigen::Ref<const Eigen::VectorXd>& x) { return (*sys)(x); },
            hash_params(id, j, 0)};
  }
  if (id == "ship") {
    auto sys = std::make_shared<ShipRoll>(ship_params_from(j));
    return {id, 2, sys->input_distribution(),
            [sys](const Eigen::Ref<const Eigen::VectorXd>& x) { return (*sys)(x); },
            hash_params(id, j, 0)};
  }
  const bool rbf2 = id == "synthetic-rbf-2d";
  const bool rbf3 = id == "synthetic-rbf-3d";
  const bool mat2 = id == "synthetic-matern-2d";
  const bool mat3 = id == "synthetic-matern-3d";
  if (rbf2 || rbf3 || mat2 || mat3) {
    reject_unknown(j, {"grid_per_dim", "box_half_width"}, id);
    int grid = 0;
    double half_width = 6.0;
    maybe(j, "grid_per_dim", grid);
    maybe(j, "box_half_width", half_width);
    const int d = (rbf2 || mat2) ? 2 : 3;
    const KernelFamily family = (rbf2 || rbf3) ? KernelFamily::RBF : KernelFamily::Matern;
    auto sys = std::make_shared<SyntheticFunction>(
        make_synthetic_function(family, d, function_seed, grid, half_width));
    return {id, d, InputDistribution::standard_normal(d),
            [sys](const Eigen::Ref<const Eigen::VectorXd>& x) { return (*sys)(x); },
            hash_params(id, j, function_seed)};
  }
  throw InvalidArgumentError("unknown system id '" + id + "'");
}

std::vector<std::pair<std::string, std::string>> list_systems() {
  return {
      {"oscillator", "nonlinear oscillator under KL-expanded forcing; mean state over [0,25]"},
      {"sir", "SIR pandemic model with KL-expanded infection rate; infected at t=20"},
      {"ship", "nonlinear ship roll in wave groups; max |roll| over ten periods"},
      {"synthetic-rbf-2d", "2-D GP draw, squared-exponential kernel (amplitude 2)"},
      {"synthetic-rbf-3d", "3-D GP draw, squared-exponential kernel (amplitude 2)"},
      {"synthetic-matern-2d", "2-D GP draw, Matern-1.5 kernel (amplitude 2)"},
      {"synthetic-matern-3d", "3-D GP draw, Matern-1.5 kernel (amplitude 2)"},
  };
}

}  // namespace glws
