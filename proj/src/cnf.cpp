#include "ctflow/cnf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ctflow/rng.hpp"

namespace ctflow {

CnfModel make_cnf(int dim, int hidden, int time_intervals, Rng& rng) {
  CnfModel model;
  model.field = FieldSpec{dim, hidden, time_intervals};
  model.params = ParamVector(model.field.layout());
  init_uniform(model.params, rng);
  return model;
}

AugState FlowRhs::deriv(double t, const AugState& y) const {
  AugState d = AugState::zeros(spec_.dim);
  d.z = field_eval(spec_, params_, t, y.z);
  d.logdet = field_trace(spec_, params_, t, y.z);
  d.cost_ot = 0.5 * d.z.squaredNorm();
  return d;
}

void FlowRhs::deriv_vjp(double t, const AugState& y, const AugState& cot, AugState& y_bar,
                        Vec& param_bar) const {
  Vec vel_cot = cot.z;
  if (cot.cost_ot != 0.0) {
    vel_cot += cot.cost_ot * field_eval(spec_, params_, t, y.z);
  }
  field_vjp(spec_, params_, t, y.z, vel_cot, cot.logdet, &y_bar.z, &param_bar);
}

CnfDensity cnf_logdensity(const CnfModel& model, const Vec& y, int steps, Scheme scheme) {
  if (y.size() != model.field.dim) {
    throw std::invalid_argument("cnf_logdensity: point dimension mismatch");
  }
  FlowRhs rhs(model.field, model.params);
  AugState init = AugState::zeros(model.field.dim);
  init.z = y;
  CnfDensity out;
  out.traj = integrate(rhs, init, 1.0, 0.0, steps, scheme);
  const AugState& w0 = out.traj.states.back();
  out.logdensity = gauss_logpdf(w0.z) + w0.logdet;
  return out;
}

CnfLoss cnf_loss(const CnfModel& model, const std::vector<Vec>& batch, int steps,
                 Scheme scheme) {
  if (batch.empty()) throw std::invalid_argument("cnf_loss: empty batch");
  const double inv_b = 1.0 / batch.size();
  FlowRhs rhs(model.field, model.params);

  CnfLoss out;
  out.grad = ParamVector::zeros_like(model.params);
  for (const Vec& y : batch) {
    const CnfDensity d = cnf_logdensity(model, y, steps, scheme);
    const AugState& w0 = d.traj.states.back();
    out.nll += -inv_b * d.logdensity;
    // the backward-accumulated cost is the negated forward-path cost
    out.transport += -inv_b * w0.cost_ot;

    AugState cot = AugState::zeros(model.field.dim);
    cot.z = inv_b * w0.z;            // d(-gauss_logpdf)/dw0
    cot.logdet = -inv_b;             // d(-logdet)
    cot.cost_ot = -inv_b * model.alpha;
    const BackpropResult bp = backprop_trajectory(rhs, d.traj, cot);
    out.grad.flat() += bp.param_grad;
  }
  out.loss = out.nll + model.alpha * out.transport;
  if (!std::isfinite(out.loss)) throw std::runtime_error("cnf_loss: non-finite loss");
  return out;
}

CnfSamples cnf_sample(const CnfModel& model, int count, std::uint64_t seed, int steps,
                      Scheme scheme) {
  Rng rng(seed);
  FlowRhs rhs(model.field, model.params);
  CnfSamples out;
  out.samples.reserve(count);
  out.trajectories.reserve(count);
  for (int i = 0; i < count; ++i) {
    AugState init = AugState::zeros(model.field.dim);
    init.z = rng.normal_vec(model.field.dim);
    out.trajectories.push_back(integrate(rhs, init, 0.0, 1.0, steps, scheme));
    out.samples.push_back(out.trajectories.back().states.back().z);
  }
  return out;
}

double straightness(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("straightness: no trajectories");
  double acc = 0.0;
  for (const Trajectory& traj : trajectories) {
    const Vec& a = traj.states.front().z;
    const Vec& b = traj.states.back().z;
    const Vec chord = b - a;
    const double len = chord.norm();
    if (len < 1e-9) continue;  // degenerate chord counts as deviation 0
    double worst = 0.0;
    for (const AugState& s : traj.states) {
      const Vec p = s.z - a;
      const double proj = std::clamp(p.dot(chord) / (len * len), 0.0, 1.0);
      worst = std::max(worst, (p - proj * chord).norm());
    }
    acc += worst / len;
  }
  return acc / trajectories.size();
}

CnfTrainResult train_cnf(const CnfTrainConfig& cfg, const GaussianMixture& target,
                         const MetricsSink& sink) {
  target.validate();
  if (target.dim() != cfg.dim) {
    throw std::invalid_argument("train_cnf: target dimension does not match config");
  }
  Rng rng(cfg.seed);
  CnfTrainResult out;
  out.model = make_cnf(cfg.dim, cfg.hidden, cfg.time_intervals, rng);
  out.model.alpha = cfg.alpha;
  AdamState opt(out.model.params.size(), cfg.adam);

  double block_loss = 0.0;
  double block_nll = 0.0;
  double block_transport = 0.0;
  int block_count = 0;
  int epoch = 0;

  for (int it = 0; it < cfg.iters; ++it) {
    const std::vector<Vec> batch = target.sample(cfg.batch, rng.raw());
    const CnfLoss l = cnf_loss(out.model, batch, cfg.steps_train, cfg.scheme);
    adam_step(out.model.params, l.grad, opt);
    block_loss += l.loss;
    block_nll += l.nll;
    block_transport += l.transport;
    ++block_count;
    if ((it + 1) % cfg.iters_per_epoch == 0 || it + 1 == cfg.iters) {
      ++epoch;
      if (sink) {
        sink(epoch, {{"loss", block_loss / block_count},
                     {"nll", block_nll / block_count},
                     {"transport", block_transport / block_count}});
      }
      out.final_loss = block_loss / block_count;
      out.final_nll = block_nll / block_count;
      block_loss = block_nll = block_transport = 0.0;
      block_count = 0;
    }
  }
  return out;
}

}  // namespace ctflow
