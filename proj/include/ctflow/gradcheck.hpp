#ifndef CTFLOW_GRADCHECK_HPP
#define CTFLOW_GRADCHECK_HPP

#include <cstdint>
#include <functional>

#include "ctflow/param.hpp"

namespace ctflow {

struct GradCheckOptions {
  double step = 1e-6;     // central-difference step per coordinate
  int max_coords = 0;     // 0 = check every coordinate, else a seeded random subset
  std::uint64_t seed = 0;
};

// Universal derivative oracle: compares an analytic gradient against central
// finite differences of the loss. Returns the worst relative error with
// denominator max(|analytic|, |fd|, 1e-8). Throws on non-finite loss values.
double grad_check(const std::function<double(const ParamVector&)>& loss,
                  const ParamVector& params, const ParamVector& analytic_grad,
                  const GradCheckOptions& opts = {});

}  // namespace ctflow

#endif
