#ifndef CTFLOW_ODEINT_HPP
#define CTFLOW_ODEINT_HPP

#include <array>
#include <cmath>
#include <vector>

#include "ctflow/types.hpp"

namespace ctflow {

// Feature vector plus the scalar accumulators of the augmented neural ODE.
// `logdet` accumulates tr grad(f) along integration time (so a backward run
// from t=1 to t=0 yields log det of the inverse map directly); the cost
// accumulators integrate their task-defined rates.
struct AugState {
  Vec z;
  double logdet = 0.0;
  double cost_ot = 0.0;
  double cost_run = 0.0;
  double cost_hjb = 0.0;

  static AugState zeros(int n) {
    AugState s;
    s.z = Vec::Zero(n);
    return s;
  }

  bool finite() const {
    return z.allFinite() && std::isfinite(logdet) && std::isfinite(cost_ot) &&
           std::isfinite(cost_run) && std::isfinite(cost_hjb);
  }

  AugState& operator+=(const AugState& o) {
    z += o.z;
    logdet += o.logdet;
    cost_ot += o.cost_ot;
    cost_run += o.cost_run;
    cost_hjb += o.cost_hjb;
    return *this;
  }

  AugState& operator*=(double s) {
    z *= s;
    logdet *= s;
    cost_ot *= s;
    cost_run *= s;
    cost_hjb *= s;
    return *this;
  }

  friend AugState operator+(AugState a, const AugState& b) { return a += b; }
  friend AugState operator*(double s, AugState a) { return a *= s; }
};

// Right-hand side of the augmented ODE: time-derivatives of every component,
// plus the matching vector-Jacobian product. The reported d(logdet)/dt must
// equal the trace of the velocity Jacobian.
class OdeRhs {
 public:
  virtual ~OdeRhs() = default;
  virtual int param_dim() const { return 0; }
  virtual AugState deriv(double t, const AugState& y) const = 0;
  // Accumulates the pullback of `cot` (a cotangent of the returned
  // derivative) into y_bar and param_bar.
  virtual void deriv_vjp(double t, const AugState& y, const AugState& cot, AugState& y_bar,
                         Vec& param_bar) const = 0;
};

// Time grid plus per-step stage inputs, retained for backpropagation.
struct Trajectory {
  double t_begin = 0.0;
  double t_end = 1.0;
  int steps = 0;
  Scheme scheme = Scheme::rk4;
  std::vector<AugState> states;                 // steps + 1 entries
  std::vector<std::array<AugState, 3>> stages;  // rk4: inputs of stages 2..4 per step

  double step_size() const { return (t_end - t_begin) / steps; }
  double time_at(int i) const {
    return i == steps ? t_end : t_begin + step_size() * i;
  }
};

// Classical explicit Euler or RK4 on the augmented state; t_begin > t_end
// integrates backward in time. Throws on a non-finite state, reporting the
// step index.
Trajectory integrate(const OdeRhs& rhs, const AugState& init, double t_begin, double t_end,
                     int steps, Scheme scheme);

// Integrates the feature state backward from t=1 starting at y; returns z(0).
Vec invert_map(const OdeRhs& rhs, const Vec& y, int steps, Scheme scheme);

struct BackpropResult {
  AugState initial_cot;  // gradient w.r.t. the initial augmented state
  Vec param_grad;        // gradient w.r.t. the hook's parameters
};

// Exact reverse sweep through the recorded steps: gradients of the discrete
// map, not of the continuous ODE. Throws if the stage cache is missing.
BackpropResult backprop_trajectory(const OdeRhs& rhs, const Trajectory& traj,
                                   const AugState& terminal_cot);

}  // namespace ctflow

#endif
