#ifndef CTFLOW_CNF_HPP
#define CTFLOW_CNF_HPP

#include <cstdint>

#include "ctflow/adam.hpp"
#include "ctflow/distributions.hpp"
#include "ctflow/field.hpp"
#include "ctflow/metrics.hpp"
#include "ctflow/odeint.hpp"

namespace ctflow {

// Continuous normalizing flow: the generator is the forward terminal map of
// the field ODE, the reference is the standard Gaussian. Densities come from
// backward integration with trace accumulation.
struct CnfModel {
  FieldSpec field;
  ParamVector params;
  double alpha = 0.0;  // transport penalty weight
};

CnfModel make_cnf(int dim, int hidden, int time_intervals, Rng& rng);

// Hook for the flow ODE with log-determinant and transport accumulators:
// d(logdet)/dt = tr grad f, d(cost_ot)/dt = |f|^2 / 2.
class FlowRhs : public OdeRhs {
 public:
  FlowRhs(const FieldSpec& spec, const ParamVector& params) : spec_(spec), params_(params) {}
  int param_dim() const override { return params_.size(); }
  AugState deriv(double t, const AugState& y) const override;
  void deriv_vjp(double t, const AugState& y, const AugState& cot, AugState& y_bar,
                 Vec& param_bar) const override;

 private:
  const FieldSpec& spec_;
  const ParamVector& params_;
};

struct CnfDensity {
  double logdensity = 0.0;
  Trajectory traj;  // backward trajectory, t: 1 -> 0
};

// log of the model density at y: integrates backward from t=1 and returns
// gauss_logpdf(w(0)) + accumulated logdet.
CnfDensity cnf_logdensity(const CnfModel& model, const Vec& y, int steps, Scheme scheme);

struct CnfLoss {
  double loss = 0.0;       // nll + alpha * transport
  double nll = 0.0;        // true negative log-likelihood, constant included
  double transport = 0.0;  // mean forward-path kinetic energy integral
  ParamVector grad;
};

CnfLoss cnf_loss(const CnfModel& model, const std::vector<Vec>& batch, int steps, Scheme scheme);

struct CnfSamples {
  std::vector<Vec> samples;
  std::vector<Trajectory> trajectories;  // forward, t: 0 -> 1
};

CnfSamples cnf_sample(const CnfModel& model, int count, std::uint64_t seed, int steps,
                      Scheme scheme);

// Mean over trajectories of max distance from the grid points to the chord
// between the endpoints, divided by the chord length (0 for degenerate
// chords). Distances are measured to the chord segment.
double straightness(const std::vector<Trajectory>& trajectories);

struct CnfTrainConfig {
  int dim = 2;
  double alpha = 0.0;
  int hidden = 64;
  int time_intervals = 8;
  Scheme scheme = Scheme::rk4;
  int steps_train = 24;
  int steps_eval = 64;
  AdamConfig adam;
  int iters = 3000;
  int batch = 256;
  int iters_per_epoch = 100;  // metrics cadence; batches are drawn fresh
  std::uint64_t seed = 1;
};

struct CnfTrainResult {
  CnfModel model;
  double final_loss = 0.0;
  double final_nll = 0.0;
};

CnfTrainResult train_cnf(const CnfTrainConfig& cfg, const GaussianMixture& target,
                         const MetricsSink& sink = {});

}  // namespace ctflow

#endif
