#ifndef CTFLOW_ADAM_HPP
#define CTFLOW_ADAM_HPP

#include "ctflow/param.hpp"

namespace ctflow {

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  Vec m;  // first moment
  Vec v;  // second moment
  long step = 0;

  explicit AdamState(int n, const AdamConfig& c = {})
      : cfg(c), m(Vec::Zero(n)), v(Vec::Zero(n)) {}
};

// Standard Adam update with bias correction. Throws if the gradient has a
// non-finite entry, naming the offending block.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state);

}  // namespace ctflow

#endif
