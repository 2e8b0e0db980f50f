#include "ctflow/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ctflow/rng.hpp"

namespace ctflow {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double gauss_logpdf(const Vec& x) {
  return -0.5 * x.size() * kLog2Pi - 0.5 * x.squaredNorm();
}

int GaussianMixture::dim() const {
  return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

void GaussianMixture::validate() const {
  if (components.empty()) {
    throw std::invalid_argument("GaussianMixture: no components");
  }
  double total = 0.0;
  for (const GmComponent& c : components) {
    if (c.stdev <= 0.0) throw std::invalid_argument("GaussianMixture: stdev must be positive");
    if (c.weight <= 0.0) throw std::invalid_argument("GaussianMixture: weight must be positive");
    if (c.mean.size() != components.front().mean.size()) {
      throw std::invalid_argument("GaussianMixture: component dimensions differ");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("GaussianMixture: weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
}

double GaussianMixture::logpdf(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> ls(components.size());
  for (size_t i = 0; i < components.size(); ++i) {
    const GmComponent& c = components[i];
    ls[i] = std::log(c.weight) - n * std::log(c.stdev) - 0.5 * n * kLog2Pi -
            (x - c.mean).squaredNorm() / (2.0 * c.stdev * c.stdev);
    best = std::max(best, ls[i]);
  }
  double acc = 0.0;
  for (double l : ls) acc += std::exp(l - best);
  return best + std::log(acc);
}

Vec GaussianMixture::grad_logpdf(const Vec& x) const {
  const int n = static_cast<int>(x.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> ls(components.size());
  for (size_t i = 0; i < components.size(); ++i) {
    const GmComponent& c = components[i];
    ls[i] = std::log(c.weight) - n * std::log(c.stdev) - 0.5 * n * kLog2Pi -
            (x - c.mean).squaredNorm() / (2.0 * c.stdev * c.stdev);
    best = std::max(best, ls[i]);
  }
  double denom = 0.0;
  for (double l : ls) denom += std::exp(l - best);
  Vec g = Vec::Zero(n);
  for (size_t i = 0; i < components.size(); ++i) {
    const GmComponent& c = components[i];
    const double r = std::exp(ls[i] - best) / denom;  // responsibility
    g += r * (c.mean - x) / (c.stdev * c.stdev);
  }
  return g;
}

std::vector<Vec> GaussianMixture::sample(int count, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> weights;
  weights.reserve(components.size());
  for (const GmComponent& c : components) weights.push_back(c.weight);
  std::vector<Vec> out;
  out.reserve(count);
  const int n = dim();
  for (int i = 0; i < count; ++i) {
    const GmComponent& c = components[rng.categorical(weights)];
    out.push_back(c.mean + c.stdev * rng.normal_vec(n));
  }
  return out;
}

double GaussianMixture::mc_entropy(int count, std::uint64_t seed) const {
  double acc = 0.0;
  for (const Vec& x : sample(count, seed)) acc += logpdf(x);
  return -acc / count;
}

GaussianMixture ring_mixture(int dim, int modes, double radius, double stdev,
                             const Vec& center) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("ring_mixture: generated mixtures support dim 1 or 2");
  }
  if (modes < 1) throw std::invalid_argument("ring_mixture: modes must be >= 1");
  Vec c = center.size() == 0 ? Vec(Vec::Zero(dim)) : center;
  if (c.size() != dim) throw std::invalid_argument("ring_mixture: center dimension mismatch");

  GaussianMixture mix;
  for (int j = 0; j < modes; ++j) {
    Vec mean = c;
    if (modes > 1) {
      if (dim == 1) {
        mean(0) += radius * (2.0 * j / (modes - 1) - 1.0);
      } else {
        const double angle = 1.5707963267948966 + 6.283185307179586 * j / modes;
        mean(0) += radius * std::cos(angle);
        mean(1) += radius * std::sin(angle);
      }
    }
    mix.components.push_back({1.0 / modes, mean, stdev});
  }
  mix.validate();
  return mix;
}

LabeledDataset make_circles(int count, double inner_radius, double outer_radius,
                            double noise_stdev, std::uint64_t seed) {
  if (!(0.0 < inner_radius && inner_radius < outer_radius)) {
    throw std::invalid_argument("make_circles: requires 0 < inner_radius < outer_radius");
  }
  if (count < 2) throw std::invalid_argument("make_circles: count must be >= 2");

  Rng rng(seed);
  LabeledDataset ds;
  ds.points.reserve(count);
  ds.labels.reserve(count);
  const int inner_count = (count + 1) / 2;
  for (int i = 0; i < count; ++i) {
    const int label = i < inner_count ? 0 : 1;
    const double r = label == 0 ? inner_radius : outer_radius;
    const double angle = rng.uniform(0.0, 6.283185307179586);
    Vec p(2);
    p(0) = r * std::cos(angle) + noise_stdev * rng.normal();
    p(1) = r * std::sin(angle) + noise_stdev * rng.normal();
    ds.points.push_back(std::move(p));
    ds.labels.push_back(label);
  }
  return ds;
}

double ObstacleCost::eval(const Vec& x) const {
  return height * std::exp(-(x - center).squaredNorm() / (2.0 * width * width));
}

Vec ObstacleCost::grad(const Vec& x) const {
  return eval(x) * (center - x) / (width * width);
}

}  // namespace ctflow
