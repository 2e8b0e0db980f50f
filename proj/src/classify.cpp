#include "ctflow/classify.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ctflow/rng.hpp"

namespace ctflow {

namespace {

// z is the only active component; accumulators stay zero.
class FeatureRhs : public OdeRhs {
 public:
  FeatureRhs(const FieldSpec& spec, const ParamVector& params) : spec_(spec), params_(params) {}

  int param_dim() const override { return params_.size(); }

  AugState deriv(double t, const AugState& y) const override {
    AugState d = AugState::zeros(spec_.dim);
    d.z = field_eval(spec_, params_, t, y.z);
    return d;
  }

  void deriv_vjp(double t, const AugState& y, const AugState& cot, AugState& y_bar,
                 Vec& param_bar) const override {
    field_vjp(spec_, params_, t, y.z, cot.z, 0.0, &y_bar.z, &param_bar);
  }

 private:
  const FieldSpec& spec_;
  const ParamVector& params_;
};

double sigmoid(double v) {
  return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
}

// numerically stable binary cross-entropy with logits
double bce_with_logits(double logit, int label) {
  return std::max(logit, 0.0) - label * logit + std::log1p(std::exp(-std::abs(logit)));
}

}  // namespace

ClassifierModel make_classifier(int data_dim, int pad, int hidden, int time_intervals,
                                Rng& rng) {
  if (pad < 0) throw std::invalid_argument("make_classifier: pad must be >= 0");
  ClassifierModel model;
  model.pad = pad;
  model.field = FieldSpec{data_dim + pad, hidden, time_intervals};

  std::vector<std::tuple<std::string, int, int>> shapes;
  for (const Block& b : model.field.layout()->blocks()) {
    shapes.emplace_back(b.name, b.rows, b.cols);
  }
  shapes.emplace_back("W_out", 1, model.field.dim);
  shapes.emplace_back("b_out", 1, 1);
  model.params = ParamVector(make_layout(shapes));
  init_uniform(model.params, rng);
  return model;
}

Vec augment(const Vec& x, int pad) {
  if (pad < 0) throw std::invalid_argument("augment: pad must be >= 0");
  Vec out = Vec::Zero(x.size() + pad);
  out.head(x.size()) = x;
  return out;
}

ClassifyForward classify_forward(const ClassifierModel& model, const Vec& x, int steps,
                                 Scheme scheme) {
  FeatureRhs rhs(model.field, model.params);
  AugState init = AugState::zeros(model.field.dim);
  init.z = augment(x, model.pad);
  ClassifyForward out;
  out.traj = integrate(rhs, init, 0.0, 1.0, steps, scheme);
  out.logit = model.params.mat("W_out").row(0).dot(out.traj.states.back().z) +
              model.params.vec("b_out")(0);
  return out;
}

ClassifyLoss classify_loss(const ClassifierModel& model, const LabeledDataset& batch, int steps,
                           Scheme scheme) {
  if (batch.size() == 0) throw std::invalid_argument("classify_loss: empty batch");
  const int d = model.field.dim;
  const double inv_b = 1.0 / batch.size();
  FeatureRhs rhs(model.field, model.params);

  ClassifyLoss out;
  out.grad = ParamVector::zeros_like(model.params);
  MatView gw = out.grad.mat("W_out");
  VecView gb = out.grad.vec("b_out");

  for (int b = 0; b < batch.size(); ++b) {
    AugState init = AugState::zeros(d);
    init.z = augment(batch.points[b], model.pad);
    const Trajectory traj = integrate(rhs, init, 0.0, 1.0, steps, scheme);
    const Vec& z1 = traj.states.back().z;
    const double logit =
        model.params.mat("W_out").row(0).dot(z1) + model.params.vec("b_out")(0);
    out.loss += inv_b * bce_with_logits(logit, batch.labels[b]);

    const double dlogit = inv_b * (sigmoid(logit) - batch.labels[b]);
    AugState cot = AugState::zeros(d);
    cot.z = dlogit * model.params.mat("W_out").row(0).transpose();
    const BackpropResult bp = backprop_trajectory(rhs, traj, cot);
    out.grad.flat() += bp.param_grad;
    gw.row(0) += dlogit * z1.transpose();
    gb(0) += dlogit;
  }
  if (!std::isfinite(out.loss)) throw std::runtime_error("classify_loss: non-finite loss");
  return out;
}

double eval_accuracy(const ClassifierModel& model, const LabeledDataset& data, int steps,
                     Scheme scheme) {
  if (data.size() == 0) throw std::invalid_argument("eval_accuracy: empty dataset");
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) {
    const double logit = classify_forward(model, data.points[i], steps, scheme).logit;
    if ((logit > 0.0) == (data.labels[i] == 1)) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

std::vector<Vec> propagate_features(const ClassifierModel& model,
                                    const std::vector<Vec>& points, int steps, Scheme scheme) {
  std::vector<Vec> out;
  out.reserve(points.size());
  for (const Vec& x : points) {
    out.push_back(classify_forward(model, x, steps, scheme).traj.states.back().z);
  }
  return out;
}

double probe_margin(const std::vector<Vec>& features, const std::vector<int>& labels,
                    int iters, std::uint64_t seed) {
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("probe_margin: bad inputs");
  }
  const int d = static_cast<int>(features.front().size());
  const int m = static_cast<int>(features.size());

  ParamVector probe(make_layout({{"w", 1, d}, {"b", 1, 1}}));
  Rng rng(seed);
  init_uniform(probe, rng);
  AdamState st(probe.size(), AdamConfig{5e-2, 0.9, 0.999, 1e-8});

  // hinge loss with a small ridge keeps the margin well-defined
  for (int it = 0; it < iters; ++it) {
    ParamVector grad = ParamVector::zeros_like(probe);
    for (int i = 0; i < m; ++i) {
      const double y = labels[i] == 1 ? 1.0 : -1.0;
      const double v = probe.mat("w").row(0).dot(features[i]) + probe.vec("b")(0);
      if (1.0 - y * v > 0.0) {
        grad.mat("w").row(0) -= (y / m) * features[i].transpose();
        grad.vec("b")(0) -= y / m;
      }
    }
    grad.mat("w").row(0) += 2e-3 * probe.mat("w").row(0);
    adam_step(probe, grad, st);
  }

  const double wnorm = probe.mat("w").row(0).norm();
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double y = labels[i] == 1 ? 1.0 : -1.0;
    const double v = probe.mat("w").row(0).dot(features[i]) + probe.vec("b")(0);
    margin = std::min(margin, y * v / std::max(wnorm, 1e-12));
  }
  return margin;
}

ClassifyTrainResult train_classifier(const ClassifyTrainConfig& cfg, const LabeledDataset& data,
                                     const MetricsSink& sink) {
  if (data.size() == 0) throw std::invalid_argument("train_classifier: empty dataset");
  const int data_dim = static_cast<int>(data.points.front().size());
  Rng rng(cfg.seed);
  ClassifyTrainResult out;
  out.model = make_classifier(data_dim, cfg.pad, cfg.hidden, cfg.time_intervals, rng);
  AdamState opt(out.model.params.size(), cfg.adam);

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  size_t cursor = 0;
  int epoch = 0;
  double epoch_loss = 0.0;
  int epoch_batches = 0;

  for (int it = 0; it < cfg.iters; ++it) {
    LabeledDataset batch;
    for (int b = 0; b < cfg.batch; ++b) {
      if (cursor == order.size()) {
        // end of a pass over the data: log and reshuffle
        ++epoch;
        if (sink) {
          const double acc = eval_accuracy(out.model, data, cfg.steps_train, cfg.scheme);
          sink(epoch, {{"loss", epoch_loss / std::max(epoch_batches, 1)}, {"accuracy", acc}});
        }
        epoch_loss = 0.0;
        epoch_batches = 0;
        rng.shuffle(order);
        cursor = 0;
      }
      batch.points.push_back(data.points[order[cursor]]);
      batch.labels.push_back(data.labels[order[cursor]]);
      ++cursor;
    }
    const ClassifyLoss l = classify_loss(out.model, batch, cfg.steps_train, cfg.scheme);
    adam_step(out.model.params, l.grad, opt);
    epoch_loss += l.loss;
    ++epoch_batches;
  }

  const LabeledDataset all = data;
  out.final_loss = classify_loss(out.model, all, cfg.steps_train, cfg.scheme).loss;
  out.final_accuracy = eval_accuracy(out.model, all, cfg.steps_eval, cfg.scheme);
  if (sink) {
    sink(epoch + 1, {{"loss", out.final_loss}, {"accuracy", out.final_accuracy}});
  }
  return out;
}

}  // namespace ctflow
