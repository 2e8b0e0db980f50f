#ifndef CTFLOW_MFG_HPP
#define CTFLOW_MFG_HPP

#include <cstdint>

#include "ctflow/adam.hpp"
#include "ctflow/distributions.hpp"
#include "ctflow/metrics.hpp"
#include "ctflow/odeint.hpp"
#include "ctflow/value_net.hpp"

namespace ctflow {

enum class MfgVariant { ot, crowd };

// Potential mean field game with quadratic running cost L = alpha/2 |f|^2
// (+ Q(x) for crowd motion). The population starts at the standard Gaussian;
// the terminal cost is the L2 derivative of KL(rho, target) (weight fixed to
// 1 for ot; configurable for crowd, where Table-1 leaves the terminal blank).
struct MfgScenario {
  MfgVariant variant = MfgVariant::ot;
  double alpha = 1.0;            // kinetic cost weight, > 0
  double beta = 1.0;             // HJB penalty weight, >= 0
  GaussianMixture target;
  double terminal_weight = 1.0;  // crowd variant only
  ObstacleCost obstacle;         // crowd variant only
  double lambda_f = 0.1;         // crowd entropy weight

  double terminal_g_weight() const {
    return variant == MfgVariant::ot ? 1.0 : terminal_weight;
  }
};

// H(x, p) = |p|^2 / (2 alpha) - Q(x) (the -Q term only for crowd motion);
// the Fenchel dual of the quadratic running cost.
double hamiltonian(const MfgScenario& scen, const Vec& x, const Vec& p);

struct Feedback {
  Vec velocity;       // f* = -grad_x(phi) / alpha
  double trace = 0.0; // tr grad f* = -lap(phi) / alpha
};

Feedback feedback_from(const ValueEval& ve, double alpha);
Feedback feedback_field(const ValueNetSpec& spec, const ParamVector& params, double alpha,
                        double t, const Vec& x);

// r = -d(phi)/dt + H(x, grad_x(phi)) - F(x, rho), with F = 0 (ot) or
// F = lambda_f (log rho + 1) (crowd). logrho is floored at -40 inside F.
double hjb_residual(const ValueNetSpec& spec, const ParamVector& params,
                    const MfgScenario& scen, double t, const Vec& x, double logrho);

// Augmented characteristics of one agent under the feedback control:
// z' = f*, logdet' = tr grad f* (so logrho(t) = logpi0 - logdet),
// cost_run' = L + F, cost_hjb' = r^2.
class MfgAgentRhs : public OdeRhs {
 public:
  MfgAgentRhs(const ValueNetSpec& spec, const ParamVector& params, const MfgScenario& scen,
              double logpi0)
      : spec_(spec), params_(params), scen_(scen), logpi0_(logpi0) {}
  int param_dim() const override { return params_.size(); }
  AugState deriv(double t, const AugState& y) const override;
  void deriv_vjp(double t, const AugState& y, const AugState& cot, AugState& y_bar,
                 Vec& param_bar) const override;

 private:
  const ValueNetSpec& spec_;
  const ParamVector& params_;
  const MfgScenario& scen_;
  double logpi0_;
};

struct MfgBatchResult {
  std::vector<Vec> terminal_z;
  std::vector<double> terminal_logrho;
  std::vector<double> running;   // accumulated running cost per agent
  std::vector<double> penalty;   // HJB penalty (integral + terminal mismatch) per agent
  double mean_running = 0.0;
  double mean_terminal = 0.0;
  double mean_penalty = 0.0;
  double objective = 0.0;      // mean_running + mean_terminal + beta * mean_penalty
  double terminal_kl = 0.0;    // mean(logrho(1) - log target(z(1)))
};

struct MfgObjective {
  double objective = 0.0;
  ParamVector grad;
  MfgBatchResult batch;
};

// Value of the training objective on a batch of reference samples, with the
// exact parameter gradient through the feedback dynamics, the terminal costs
// and the HJB penalty.
MfgObjective mfg_objective(const ValueNetSpec& spec, const ParamVector& params,
                           const MfgScenario& scen, const std::vector<Vec>& batch, int steps,
                           Scheme scheme);

struct MfgModel {
  ValueNetSpec value;
  ParamVector params;
  MfgScenario scenario;
};

MfgModel make_mfg(const MfgScenario& scen, int dim, int hidden, Rng& rng);

// Gradient-free evaluation pass: trajectories, transported log-densities and
// HJB residuals on the grid, plus summary statistics.
struct MfgEvalResult {
  std::vector<Trajectory> trajectories;
  std::vector<std::vector<double>> logrho;    // per trajectory, per grid point
  std::vector<std::vector<double>> residual;  // per trajectory, per grid point
  double mean_running = 0.0;
  double mean_terminal = 0.0;
  double mean_penalty = 0.0;
  double objective = 0.0;
  double straightness = 0.0;
  double terminal_kl = 0.0;
  double mean_abs_residual = 0.0;  // discrete mean over agents and grid points
};

MfgEvalResult mfg_evaluate(const MfgModel& model, const std::vector<Vec>& xs, int steps,
                           Scheme scheme);

// Mean over trajectories of the maximum obstacle cost along the grid.
double mean_max_obstacle(const std::vector<Trajectory>& trajectories, const ObstacleCost& obs);

struct MfgTrainConfig {
  int dim = 2;
  int hidden = 64;
  Scheme scheme = Scheme::rk4;
  int steps_train = 16;
  int steps_eval = 64;
  AdamConfig adam;
  int iters = 4000;
  int batch = 64;
  int iters_per_epoch = 200;
  int eval_agents = 256;  // fixed batch used for the metrics records
  std::uint64_t seed = 1;
};

struct MfgTrainResult {
  MfgModel model;
  double initial_abs_residual = 0.0;  // epoch-0 metric
  double final_abs_residual = 0.0;
  double final_objective = 0.0;
};

// Adam loop on fresh reference batches; logs the objective decomposition and
// the mean |HJB residual| at epoch 0 and once per block of iterations.
MfgTrainResult train_mfg(const MfgTrainConfig& cfg, const MfgScenario& scen,
                         const MetricsSink& sink = {});

}  // namespace ctflow

#endif
