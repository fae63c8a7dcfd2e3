#include "otkit/gaussian_mixture.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "otkit/problems.hpp"

namespace otkit {

namespace {

constexpr double kCovTolerance = 1e-10;

}  // namespace

Gaussian::Gaussian(Vector mean_, Matrix cov_)
    : mean(std::move(mean_)), cov(std::move(cov_)) {
  const Eigen::Index d = mean.size();
  if (d < 1) throw std::invalid_argument("Gaussian dimension must be >= 1");
  if (cov.rows() != d || cov.cols() != d) {
    throw std::invalid_argument("covariance shape does not match the mean");
  }
  if (!mean.allFinite() || !cov.allFinite()) {
    throw std::invalid_argument("Gaussian parameters must be finite");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kCovTolerance) {
    throw std::invalid_argument("covariance must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kCovTolerance) {
    throw std::invalid_argument("covariance must be positive semidefinite");
  }
}

GaussianMixture::GaussianMixture(Vector weights_,
                                 std::vector<Gaussian> components_)
    : weights(std::move(weights_)), components(std::move(components_)) {
  if (components.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  if (weights.size() != static_cast<Eigen::Index>(components.size())) {
    throw std::invalid_argument("one weight per mixture component is required");
  }
  validate_histogram(weights, "mixture weights");
  for (const Gaussian& g : components) {
    if (g.dimension() != components.front().dimension()) {
      throw std::invalid_argument("mixture components must share a dimension");
    }
  }
}

Matrix psd_sqrt(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() *
         eig.eigenvectors().transpose();
}

double bures_w2(const Gaussian& g1, const Gaussian& g2) {
  if (g1.dimension() != g2.dimension()) {
    throw std::invalid_argument("bures_w2: dimension mismatch");
  }
  const Matrix root1 = psd_sqrt(g1.cov);
  Matrix middle = root1 * g2.cov * root1;
  middle = 0.5 * (middle + middle.transpose());
  const double cross = psd_sqrt(middle).trace();
  const double value = (g1.mean - g2.mean).squaredNorm() + g1.cov.trace() +
                       g2.cov.trace() - 2.0 * cross;
  return std::max(value, 0.0);
}

GmmDistance gmm_distance(const GaussianMixture& mm1, const GaussianMixture& mm2,
                         const GmmDistanceOptions& opts) {
  if (mm1.dimension() != mm2.dimension()) {
    throw std::invalid_argument("gmm_distance: dimension mismatch");
  }
  GmmDistance out;
  out.cost.resize(mm1.size(), mm2.size());
  for (Eigen::Index i = 0; i < mm1.size(); ++i) {
    for (Eigen::Index j = 0; j < mm2.size(); ++j) {
      out.cost(i, j) = bures_w2(mm1.components[i], mm2.components[j]);
    }
  }
  const double scale = out.cost.mean();
  // An all-zero cost makes every coupling optimal.
  const double eps = scale > 0.0 ? opts.eps_rel * scale : 1.0;
  const LinearProblem prob(std::make_shared<DenseGeometry>(out.cost),
                           mm1.weights, mm2.weights);
  const SinkhornOutput sol = solve_sinkhorn(prob, eps, opts.sinkhorn);
  out.coupling =
      round_to_feasible(transport_matrix(sol, prob), mm1.weights, mm2.weights);
  out.value = (out.cost.array() * out.coupling.array()).sum();
  return out;
}

}  // namespace otkit
