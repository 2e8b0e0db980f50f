#include "ctflow/odeint.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace ctflow {

Trajectory integrate(const OdeRhs& rhs, const AugState& init, double t_begin, double t_end,
                     int steps, Scheme scheme) {
  if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
  if (!init.finite()) throw std::runtime_error("integrate: non-finite initial state");

  Trajectory traj;
  traj.t_begin = t_begin;
  traj.t_end = t_end;
  traj.steps = steps;
  traj.scheme = scheme;
  traj.states.reserve(steps + 1);
  traj.states.push_back(init);
  if (scheme == Scheme::rk4) traj.stages.reserve(steps);

  const double h = traj.step_size();
  for (int i = 0; i < steps; ++i) {
    const double t = traj.time_at(i);
    const AugState& y = traj.states.back();
    AugState next;
    if (scheme == Scheme::euler) {
      next = y + h * rhs.deriv(t, y);
    } else {
      const double tm = t + 0.5 * h;
      const AugState k1 = rhs.deriv(t, y);
      AugState s2 = y + (0.5 * h) * k1;
      const AugState k2 = rhs.deriv(tm, s2);
      AugState s3 = y + (0.5 * h) * k2;
      const AugState k3 = rhs.deriv(tm, s3);
      AugState s4 = y + h * k3;
      const AugState k4 = rhs.deriv(traj.time_at(i + 1), s4);
      next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      traj.stages.push_back({std::move(s2), std::move(s3), std::move(s4)});
    }
    if (!next.finite()) {
      throw std::runtime_error("integrate: non-finite state at step " + std::to_string(i + 1));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Vec invert_map(const OdeRhs& rhs, const Vec& y, int steps, Scheme scheme) {
  AugState init = AugState::zeros(static_cast<int>(y.size()));
  init.z = y;
  return integrate(rhs, init, 1.0, 0.0, steps, scheme).states.back().z;
}

BackpropResult backprop_trajectory(const OdeRhs& rhs, const Trajectory& traj,
                                   const AugState& terminal_cot) {
  if (traj.states.size() != static_cast<size_t>(traj.steps) + 1) {
    throw std::invalid_argument("backprop_trajectory: trajectory state cache incomplete");
  }
  if (traj.scheme == Scheme::rk4 && traj.stages.size() != static_cast<size_t>(traj.steps)) {
    throw std::invalid_argument("backprop_trajectory: missing RK stage cache");
  }

  const double h = traj.step_size();
  const int n = static_cast<int>(traj.states.front().z.size());
  BackpropResult out;
  out.param_grad = Vec::Zero(rhs.param_dim());
  AugState ybar = terminal_cot;

  for (int i = traj.steps - 1; i >= 0; --i) {
    const double t = traj.time_at(i);
    const AugState& y = traj.states[i];
    if (traj.scheme == Scheme::euler) {
      // y_{i+1} = y_i + h k1, k1 = f(t_i, y_i)
      const AugState kbar1 = h * ybar;
      rhs.deriv_vjp(t, y, kbar1, ybar, out.param_grad);
    } else {
      const double tm = t + 0.5 * h;
      const auto& st = traj.stages[i];
      AugState kbar1 = (h / 6.0) * ybar;
      AugState kbar2 = (h / 3.0) * ybar;
      AugState kbar3 = (h / 3.0) * ybar;
      const AugState kbar4 = (h / 6.0) * ybar;

      // k4 = f(t_{i+1}, s4), s4 = y + h k3
      AugState sbar = AugState::zeros(n);
      rhs.deriv_vjp(traj.time_at(i + 1), st[2], kbar4, sbar, out.param_grad);
      ybar += sbar;
      kbar3 += h * sbar;

      // k3 = f(tm, s3), s3 = y + h/2 k2
      sbar = AugState::zeros(n);
      rhs.deriv_vjp(tm, st[1], kbar3, sbar, out.param_grad);
      ybar += sbar;
      kbar2 += (0.5 * h) * sbar;

      // k2 = f(tm, s2), s2 = y + h/2 k1
      sbar = AugState::zeros(n);
      rhs.deriv_vjp(tm, st[0], kbar2, sbar, out.param_grad);
      ybar += sbar;
      kbar1 += (0.5 * h) * sbar;

      // k1 = f(t_i, y_i)
      rhs.deriv_vjp(t, y, kbar1, ybar, out.param_grad);
    }
  }
  out.initial_cot = std::move(ybar);
  return out;
}

}  // namespace ctflow
