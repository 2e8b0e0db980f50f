#ifndef CTFLOW_DISTRIBUTIONS_HPP
#define CTFLOW_DISTRIBUTIONS_HPP

#include <cstdint>
#include <vector>

#include "ctflow/types.hpp"

namespace ctflow {

// log density of the standard normal in dim(x) dimensions
double gauss_logpdf(const Vec& x);

struct GmComponent {
  double weight = 1.0;
  Vec mean;
  double stdev = 1.0;  // isotropic
};

struct GaussianMixture {
  std::vector<GmComponent> components;

  int dim() const;
  void validate() const;  // weights sum to 1, stdevs > 0, equal dims
  double logpdf(const Vec& x) const;
  Vec grad_logpdf(const Vec& x) const;
  std::vector<Vec> sample(int count, std::uint64_t seed) const;
  // Monte-Carlo entropy estimate: -mean log density over own samples.
  double mc_entropy(int count, std::uint64_t seed) const;
};

// m modes equally spaced on a circle of radius `radius` around `center`
// (first mode at angle pi/2) for dim 2; equally spaced on the segment
// [center - radius, center + radius] for dim 1.
GaussianMixture ring_mixture(int dim, int modes, double radius, double stdev,
                             const Vec& center);

struct LabeledDataset {
  std::vector<Vec> points;
  std::vector<int> labels;  // 0 or 1
  int size() const { return static_cast<int>(points.size()); }
};

// Two noisy concentric circles; class 0 on the inner radius (ceil(count/2)
// points), class 1 on the outer. Gaussian noise is added per coordinate.
LabeledDataset make_circles(int count, double inner_radius, double outer_radius,
                            double noise_stdev, std::uint64_t seed);

// Smooth obstacle bump Q(x) = height * exp(-|x - center|^2 / (2 width^2)).
struct ObstacleCost {
  Vec center;
  double height = 50.0;
  double width = 0.5;

  double eval(const Vec& x) const;
  Vec grad(const Vec& x) const;
};

}  // namespace ctflow

#endif
