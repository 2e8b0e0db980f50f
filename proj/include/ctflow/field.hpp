#ifndef CTFLOW_FIELD_HPP
#define CTFLOW_FIELD_HPP

#include <cmath>
#include <string>

#include "ctflow/param.hpp"

namespace ctflow {

// tanh and its first three derivatives at one pre-activation value.
struct TanhDerivs {
  double t;   // tanh(a)
  double t1;  // 1 - t^2
  double t2;  // -2 t (1 - t^2)
  double t3;  // -2 (1 - t^2)(1 - 3 t^2)
};

inline TanhDerivs tanh_derivs(double a) {
  const double t = std::tanh(a);
  const double t1 = 1.0 - t * t;
  return {t, t1, -2.0 * t * t1, -2.0 * t1 * (1.0 - 3.0 * t * t)};
}

// One-hidden-layer tanh vector field f(z) = W1 tanh(W0 z + b0) + b1 with
// piecewise-constant weights over `time_intervals` equal subintervals of
// [0, 1]. Blocks per interval i: W0_i (k x n), b0_i (k), W1_i (n x k),
// b1_i (n).
struct FieldSpec {
  int dim = 1;
  int hidden = 8;
  int time_intervals = 1;

  bool autonomous() const { return time_intervals == 1; }
  int interval_at(double t) const;
  LayoutPtr layout() const;

  static std::string w0(int i) { return "W0_" + std::to_string(i); }
  static std::string b0(int i) { return "b0_" + std::to_string(i); }
  static std::string w1(int i) { return "W1_" + std::to_string(i); }
  static std::string b1(int i) { return "b1_" + std::to_string(i); }
};

Vec field_eval(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z);

// dF/dz = W1 diag(t') W0 for the active interval.
Mat field_jacobian(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z);

// tr dF/dz without forming the matrix.
double field_trace(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z);

// Reverse-mode derivatives of (f, tr df/dz) contracted with the cotangents
// vel_cot (size n) and trace_cot. Accumulates into *z_bar (size n) and
// *param_bar (flat, sized like params); either may be null.
void field_vjp(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z,
               const Vec& vel_cot, double trace_cot, Vec* z_bar, Vec* param_bar);

// z + f(z); one forward-Euler step of unit size. Requires an autonomous spec.
Vec resnet_step(const FieldSpec& spec, const ParamVector& params, const Vec& z);

}  // namespace ctflow

#endif
