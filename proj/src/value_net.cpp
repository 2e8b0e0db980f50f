#include "ctflow/value_net.hpp"

#include <stdexcept>

#include "ctflow/field.hpp"

namespace ctflow {

namespace {

void check_x(const ValueNetSpec& spec, const Vec& x) {
  if (x.size() != spec.dim) {
    throw std::invalid_argument("value_net: input has dimension " + std::to_string(x.size()) +
                                ", spec expects " + std::to_string(spec.dim));
  }
}

}  // namespace

LayoutPtr ValueNetSpec::layout() const {
  return make_layout({{"W0", hidden, dim + 1},
                      {"b0", hidden, 1},
                      {"w1", 1, hidden},
                      {"b1", 1, 1}});
}

ValueEval value_eval(const ValueNetSpec& spec, const ParamVector& params, double t,
                     const Vec& x) {
  check_x(spec, x);
  const int n = spec.dim;
  const int k = spec.hidden;
  ConstMatView w0 = params.mat("W0");
  ConstMatView w1 = params.mat("w1");

  Vec u(n + 1);
  u(0) = t;
  u.tail(n) = x;
  const Vec a = w0 * u + params.vec("b0");

  ValueEval out;
  out.grad_x = Vec::Zero(n);
  out.phi = params.vec("b1")(0);
  Vec du = Vec::Zero(n + 1);
  for (int j = 0; j < k; ++j) {
    const TanhDerivs d = tanh_derivs(a(j));
    const double wj = w1(0, j);
    out.phi += wj * d.t;
    du += (wj * d.t1) * w0.row(j).transpose();
    const double rj = w0.row(j).tail(n).squaredNorm();
    out.lap += wj * d.t2 * rj;
  }
  out.dt = du(0);
  out.grad_x = du.tail(n);
  return out;
}

void value_vjp(const ValueNetSpec& spec, const ParamVector& params, double t, const Vec& x,
               const ValueCot& cot, Vec* x_bar, double* t_bar, Vec* param_bar) {
  check_x(spec, x);
  if (cot.grad_x.size() != 0 && cot.grad_x.size() != spec.dim) {
    throw std::invalid_argument("value_vjp: gradient cotangent dimension mismatch");
  }
  const int n = spec.dim;
  const int k = spec.hidden;
  ConstMatView w0 = params.mat("W0");
  ConstMatView w1 = params.mat("w1");

  Vec u(n + 1);
  u(0) = t;
  u.tail(n) = x;
  const Vec a = w0 * u + params.vec("b0");

  // v = cotangent direction in (t, x) space for the first-derivative outputs
  Vec v = Vec::Zero(n + 1);
  v(0) = cot.dt;
  if (cot.grad_x.size() != 0) v.tail(n) = cot.grad_x;

  Vec q(k);           // dL/da
  Vec gw1(k);         // dL/dw1
  Vec g(k);           // w1_j t'_j, needed for the direct W0 term
  Vec h2w(k);         // w1_j t''_j
  for (int j = 0; j < k; ++j) {
    const TanhDerivs d = tanh_derivs(a(j));
    const double wj = w1(0, j);
    const double mj = w0.row(j).dot(v);
    const double rj = w0.row(j).tail(n).squaredNorm();
    q(j) = cot.phi * wj * d.t1 + wj * d.t2 * mj + cot.lap * wj * d.t3 * rj;
    gw1(j) = cot.phi * d.t + d.t1 * mj + cot.lap * d.t2 * rj;
    g(j) = wj * d.t1;
    h2w(j) = wj * d.t2;
  }

  const Vec ubar = w0.transpose() * q;
  if (t_bar != nullptr) *t_bar += ubar(0);
  if (x_bar != nullptr) *x_bar += ubar.tail(n);

  if (param_bar != nullptr) {
    if (param_bar->size() != params.size()) {
      throw std::invalid_argument("value_vjp: param gradient buffer size mismatch");
    }
    const BlockLayout& layout = params.layout();
    MatView gw0(param_bar->data() + layout.at("W0").offset, k, n + 1);
    VecView gb0(param_bar->data() + layout.at("b0").offset, k);
    VecView gw1v(param_bar->data() + layout.at("w1").offset, k);
    VecView gb1(param_bar->data() + layout.at("b1").offset, 1);

    gw0 += q * u.transpose() + g * v.transpose();
    if (cot.lap != 0.0) {
      // direct Laplacian dependence on the spatial columns of W0
      gw0.rightCols(n) += (2.0 * cot.lap) * (h2w.asDiagonal() * Mat(w0.rightCols(n)));
    }
    gb0 += q;
    gw1v += gw1;
    gb1(0) += cot.phi;
  }
}

}  // namespace ctflow
