#include "ctflow/field.hpp"

#include <stdexcept>
#include <vector>

namespace ctflow {

namespace {

constexpr double kTimeTol = 1e-9;

void check_inputs(const FieldSpec& spec, double t, const Vec& z) {
  if (z.size() != spec.dim) {
    throw std::invalid_argument("field: state has dimension " + std::to_string(z.size()) +
                                ", spec expects " + std::to_string(spec.dim));
  }
  if (t < -kTimeTol || t > 1.0 + kTimeTol) {
    throw std::invalid_argument("field: time " + std::to_string(t) + " outside [0, 1]");
  }
}

}  // namespace

int FieldSpec::interval_at(double t) const {
  const int i = static_cast<int>(std::floor(t * time_intervals));
  return std::min(std::max(i, 0), time_intervals - 1);
}

LayoutPtr FieldSpec::layout() const {
  std::vector<std::tuple<std::string, int, int>> shapes;
  for (int i = 0; i < time_intervals; ++i) {
    shapes.emplace_back(w0(i), hidden, dim);
    shapes.emplace_back(b0(i), hidden, 1);
    shapes.emplace_back(w1(i), dim, hidden);
    shapes.emplace_back(b1(i), dim, 1);
  }
  return make_layout(shapes);
}

Vec field_eval(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z) {
  check_inputs(spec, t, z);
  const int i = spec.interval_at(t);
  const Vec a = params.mat(FieldSpec::w0(i)) * z + params.vec(FieldSpec::b0(i));
  return params.mat(FieldSpec::w1(i)) * a.array().tanh().matrix() + params.vec(FieldSpec::b1(i));
}

Mat field_jacobian(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z) {
  check_inputs(spec, t, z);
  const int i = spec.interval_at(t);
  ConstMatView w0 = params.mat(FieldSpec::w0(i));
  const Vec a = w0 * z + params.vec(FieldSpec::b0(i));
  const Vec t1 = (1.0 - a.array().tanh().square()).matrix();
  return params.mat(FieldSpec::w1(i)) * t1.asDiagonal() * w0;
}

double field_trace(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z) {
  check_inputs(spec, t, z);
  const int i = spec.interval_at(t);
  ConstMatView w0 = params.mat(FieldSpec::w0(i));
  ConstMatView w1 = params.mat(FieldSpec::w1(i));
  const Vec a = w0 * z + params.vec(FieldSpec::b0(i));
  double tr = 0.0;
  for (int j = 0; j < spec.hidden; ++j) {
    const double t1 = 1.0 - std::pow(std::tanh(a(j)), 2);
    tr += t1 * w0.row(j).dot(w1.col(j));
  }
  return tr;
}

void field_vjp(const FieldSpec& spec, const ParamVector& params, double t, const Vec& z,
               const Vec& vel_cot, double trace_cot, Vec* z_bar, Vec* param_bar) {
  check_inputs(spec, t, z);
  if (vel_cot.size() != spec.dim) {
    throw std::invalid_argument("field_vjp: cotangent has dimension " +
                                std::to_string(vel_cot.size()) + ", spec expects " +
                                std::to_string(spec.dim));
  }
  const int i = spec.interval_at(t);
  ConstMatView w0 = params.mat(FieldSpec::w0(i));
  ConstMatView w1 = params.mat(FieldSpec::w1(i));
  const int k = spec.hidden;

  const Vec a = w0 * z + params.vec(FieldSpec::b0(i));
  Vec h(k), h1(k), h2(k), s(k);
  for (int j = 0; j < k; ++j) {
    const TanhDerivs d = tanh_derivs(a(j));
    h(j) = d.t;
    h1(j) = d.t1;
    h2(j) = d.t2;
    s(j) = w0.row(j).dot(w1.col(j));
  }

  // q = dL/da for L = vel_cot . f + trace_cot * tr df/dz
  const Vec wu = w1.transpose() * vel_cot;
  const Vec q = h1.cwiseProduct(wu) + trace_cot * h2.cwiseProduct(s);

  if (z_bar != nullptr) {
    *z_bar += w0.transpose() * q;
  }
  if (param_bar != nullptr) {
    if (param_bar->size() != params.size()) {
      throw std::invalid_argument("field_vjp: param gradient buffer size mismatch");
    }
    const BlockLayout& layout = params.layout();
    MatView gw0(param_bar->data() + layout.at(FieldSpec::w0(i)).offset, k, spec.dim);
    VecView gb0(param_bar->data() + layout.at(FieldSpec::b0(i)).offset, k);
    MatView gw1(param_bar->data() + layout.at(FieldSpec::w1(i)).offset, spec.dim, k);
    VecView gb1(param_bar->data() + layout.at(FieldSpec::b1(i)).offset, spec.dim);

    gw0 += q * z.transpose() + trace_cot * (h1.asDiagonal() * Mat(w1.transpose()));
    gb0 += q;
    gw1 += vel_cot * h.transpose() + trace_cot * Mat(h1.asDiagonal() * w0).transpose();
    gb1 += vel_cot;
  }
}

Vec resnet_step(const FieldSpec& spec, const ParamVector& params, const Vec& z) {
  if (!spec.autonomous()) {
    throw std::invalid_argument("resnet_step: requires an autonomous field (one interval)");
  }
  return z + field_eval(spec, params, 0.0, z);
}

}  // namespace ctflow
