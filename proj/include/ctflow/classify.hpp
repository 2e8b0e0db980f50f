#ifndef CTFLOW_CLASSIFY_HPP
#define CTFLOW_CLASSIFY_HPP

#include <cstdint>

#include "ctflow/adam.hpp"
#include "ctflow/distributions.hpp"
#include "ctflow/field.hpp"
#include "ctflow/metrics.hpp"
#include "ctflow/odeint.hpp"

namespace ctflow {

// Binary classifier F(x) = W z(1) + b on ODE-propagated, optionally
// zero-padded features. The readout blocks W_out (1 x d) and b_out live in
// the same parameter vector as the field.
struct ClassifierModel {
  FieldSpec field;  // field.dim = data_dim + pad
  int pad = 0;
  ParamVector params;

  int data_dim() const { return field.dim - pad; }
};

ClassifierModel make_classifier(int data_dim, int pad, int hidden, int time_intervals,
                                Rng& rng);

Vec augment(const Vec& x, int pad);

struct ClassifyForward {
  double logit = 0.0;
  Trajectory traj;
};

ClassifyForward classify_forward(const ClassifierModel& model, const Vec& x, int steps,
                                 Scheme scheme);

struct ClassifyLoss {
  double loss = 0.0;
  ParamVector grad;
};

// Mean binary cross-entropy with logits over the batch, with the exact
// parameter gradient (field via the trajectory reverse sweep, readout direct).
ClassifyLoss classify_loss(const ClassifierModel& model, const LabeledDataset& batch, int steps,
                           Scheme scheme);

double eval_accuracy(const ClassifierModel& model, const LabeledDataset& data, int steps,
                     Scheme scheme);

// z(1) for every point, at evaluation resolution.
std::vector<Vec> propagate_features(const ClassifierModel& model,
                                    const std::vector<Vec>& points, int steps, Scheme scheme);

// Geometric hinge margin of a linear probe trained on frozen features;
// negative when the probe cannot separate the classes.
double probe_margin(const std::vector<Vec>& features, const std::vector<int>& labels,
                    int iters = 800, std::uint64_t seed = 0);

struct ClassifyTrainConfig {
  int pad = 1;
  int hidden = 16;
  int time_intervals = 8;
  Scheme scheme = Scheme::rk4;
  int steps_train = 32;
  int steps_eval = 64;
  AdamConfig adam;
  int iters = 2000;
  int batch = 64;
  std::uint64_t seed = 1;
};

struct ClassifyTrainResult {
  ClassifierModel model;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
};

// Adam loop over minibatches; one metrics record per pass over the data.
ClassifyTrainResult train_classifier(const ClassifyTrainConfig& cfg, const LabeledDataset& data,
                                     const MetricsSink& sink = {});

}  // namespace ctflow

#endif
