#ifndef CTFLOW_VALUE_NET_HPP
#define CTFLOW_VALUE_NET_HPP

#include "ctflow/param.hpp"

namespace ctflow {

// Scalar network Phi(t, x) = w1 tanh(W0 (t, x) + b0) + b1 with time as an
// extra input coordinate. Blocks: W0 (k x (n+1)), b0 (k), w1 (1 x k), b1 (1).
struct ValueNetSpec {
  int dim = 1;     // spatial dimension n; the network input has n+1 entries
  int hidden = 8;
  LayoutPtr layout() const;
};

struct ValueEval {
  double phi = 0.0;
  double dt = 0.0;    // d(phi)/dt
  Vec grad_x;         // d(phi)/dx
  double lap = 0.0;   // sum_i d^2(phi)/dx_i^2
};

ValueEval value_eval(const ValueNetSpec& spec, const ParamVector& params, double t, const Vec& x);

// Cotangents for the four outputs of value_eval; grad_x may be empty (zero).
struct ValueCot {
  double phi = 0.0;
  double dt = 0.0;
  Vec grad_x;
  double lap = 0.0;
};

// Exact reverse-mode derivatives of value_eval contracted with cot.
// Accumulates into *x_bar, *t_bar and *param_bar; any may be null.
// Backpropagation through the Laplacian output uses the third tanh
// derivative.
void value_vjp(const ValueNetSpec& spec, const ParamVector& params, double t, const Vec& x,
               const ValueCot& cot, Vec* x_bar, double* t_bar, Vec* param_bar);

}  // namespace ctflow

#endif
