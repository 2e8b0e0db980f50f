#include "ctflow/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ctflow {

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state) {
  const int n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw std::invalid_argument("adam_step: parameter/gradient/state length mismatch");
  }
  if (!grad.flat().allFinite()) {
    throw std::runtime_error("adam_step: non-finite gradient in block '" +
                             first_nonfinite_block(grad) + "'");
  }

  const AdamConfig& c = state.cfg;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

  const Vec& g = grad.flat();
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * g;
  state.v = c.beta2 * state.v + (1.0 - c.beta2) * g.cwiseProduct(g);

  params.flat() -= c.lr * (state.m / bc1).cwiseQuotient(
      ((state.v / bc2).cwiseSqrt().array() + c.eps).matrix());
}

}  // namespace ctflow
