#include "ctflow/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ctflow/rng.hpp"

namespace ctflow {

double grad_check(const std::function<double(const ParamVector&)>& loss,
                  const ParamVector& params, const ParamVector& analytic_grad,
                  const GradCheckOptions& opts) {
  const int n = params.size();
  if (analytic_grad.size() != n) {
    throw std::invalid_argument("grad_check: gradient length mismatch");
  }

  std::vector<int> coords(n);
  std::iota(coords.begin(), coords.end(), 0);
  if (opts.max_coords > 0 && opts.max_coords < n) {
    Rng rng(opts.seed);
    rng.shuffle(coords);
    coords.resize(opts.max_coords);
    std::sort(coords.begin(), coords.end());
  }

  ParamVector work = params;
  double worst = 0.0;
  for (int i : coords) {
    const double saved = work.flat()(i);
    work.flat()(i) = saved + opts.step;
    const double fp = loss(work);
    work.flat()(i) = saved - opts.step;
    const double fm = loss(work);
    work.flat()(i) = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw std::runtime_error("grad_check: non-finite loss at coordinate " + std::to_string(i));
    }
    const double fd = (fp - fm) / (2.0 * opts.step);
    const double a = analytic_grad.flat()(i);
    const double denom = std::max({std::abs(a), std::abs(fd), 1e-8});
    worst = std::max(worst, std::abs(a - fd) / denom);
  }
  return worst;
}

}  // namespace ctflow
