#pragma once

#include <array>

namespace glws {

/// One classical fixed-step RK4 step for a small state vector. The
/// right-hand side is called as f(state, deriv, stage) where stage indexes
/// the half-step grid: 0 at t, 1 at t + dt/2, 2 at t + dt.
template <std::size_t N, typename Rhs>
void rk4_step(std::array<double, N>& state, double dt, Rhs&& rhs) {
  std::array<double, N> k1, k2, k3, k4, tmp;
  rhs(state, k1, 0);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
  rhs(tmp, k2, 1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
  rhs(tmp, k3, 1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = state[i] + dt * k3[i];
  rhs(tmp, k4, 2);
  for (std::size_t i = 0; i < N; ++i)
    state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace glws
