#pragma once

#include <vector>

#include "otkit/geometry.hpp"
#include "otkit/sinkhorn.hpp"

namespace otkit {

// Covariances must be symmetric to 1e-10 with eigenvalues >= -1e-10;
// slightly negative eigenvalues are clamped to zero in computations.
struct Gaussian {
  Gaussian(Vector mean, Matrix cov);

  Eigen::Index dimension() const { return mean.size(); }

  Vector mean;
  Matrix cov;
};

struct GaussianMixture {
  GaussianMixture(Vector weights, std::vector<Gaussian> components);

  Eigen::Index size() const { return weights.size(); }
  Eigen::Index dimension() const { return components.front().dimension(); }

  Vector weights;
  std::vector<Gaussian> components;
};

// Symmetric PSD square root through an eigendecomposition, negative
// eigenvalues clamped to zero.
Matrix psd_sqrt(const Matrix& m);

// Squared 2-Wasserstein distance between Gaussians:
// |m1 - m2|^2 + tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
double bures_w2(const Gaussian& g1, const Gaussian& g2);

struct GmmDistanceOptions {
  // eps = eps_rel * mean of the component cost matrix.
  double eps_rel = 1e-3;
  SinkhornOptions sinkhorn{1e-11, 100000, 10};
};

struct GmmDistance {
  double value = 0.0;
  // K1 x K2 map between mixture components, exactly in U(w1, w2).
  Matrix coupling;
  Matrix cost;
};

// Transport between mixture components with Gaussian W2^2 as ground cost.
GmmDistance gmm_distance(const GaussianMixture& mm1, const GaussianMixture& mm2,
                         const GmmDistanceOptions& opts = {});

}  // namespace otkit
