#include "otkit/barycenter.hpp"

#include <cmath>
#include <stdexcept>

namespace otkit {

BarycenterProblem::BarycenterProblem(GeometryPtr geom_,
                                     std::vector<Vector> histograms_,
                                     Vector weights_)
    : geom(std::move(geom_)),
      histograms(std::move(histograms_)),
      weights(std::move(weights_)) {
  if (!geom) throw std::invalid_argument("barycenter problem needs a geometry");
  if (geom->rows() != geom->cols()) {
    throw std::invalid_argument("barycenter support geometry must be square");
  }
  if (histograms.empty()) {
    throw std::invalid_argument("barycenter needs at least one histogram");
  }
  if (weights.size() != static_cast<Eigen::Index>(histograms.size())) {
    throw std::invalid_argument("one weight per histogram is required");
  }
  validate_histogram(weights, "barycenter weights");
  for (const Vector& h : histograms) {
    if (h.size() != geom->rows()) {
      throw std::invalid_argument("histogram length does not match the support");
    }
    validate_histogram(h, "histogram");
  }
}

BarycenterProblem::BarycenterProblem(GeometryPtr geom_,
                                     std::vector<Vector> histograms_)
    : BarycenterProblem(geom_, histograms_,
                        uniform_weights(static_cast<Eigen::Index>(
                            std::max<std::size_t>(histograms_.size(), 1)))) {}

BarycenterOutput solve_barycenter(const BarycenterProblem& bp, double eps,
                                  const BarycenterOptions& opts) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be a positive finite number");
  }
  if (!(opts.threshold > 0.0) || opts.max_iters < 1) {
    throw std::invalid_argument("invalid barycenter options");
  }
  const Geometry& geom = *bp.geom;
  const Eigen::Index n = geom.rows();
  const std::size_t num = bp.histograms.size();
  const Vector zeros = Vector::Zero(n);

  // Scalings u_k, v_k stored as potentials eps * log(.).
  std::vector<Vector> log_hist(num);
  std::vector<Vector> u(num, zeros);
  std::vector<Vector> v(num, zeros);
  std::vector<Vector> ktu(num);
  for (std::size_t k = 0; k < num; ++k) {
    log_hist[k] = eps * bp.histograms[k].array().log().matrix();
  }

  BarycenterOutput out;
  Vector log_p = zeros;
  for (int it = 1; it <= opts.max_iters; ++it) {
    out.iterations = it;
    // u_k = b_k / (K v_k); K^T u_k.
    for (std::size_t k = 0; k < num; ++k) {
      u[k] = log_hist[k] - geom.apply_lse_kernel(zeros, v[k], eps, Axis::kRows);
      ktu[k] = geom.apply_lse_kernel(u[k], zeros, eps, Axis::kCols);
    }
    // p = prod_k (K^T u_k)^{w_k}
    log_p.setZero();
    for (std::size_t k = 0; k < num; ++k) log_p += bp.weights[k] * ktu[k];
    if (log_p.array().isNaN().any()) {
      throw SolverError("NaN in barycenter iterations; eps is likely too small",
                        it);
    }
    const Vector p = (log_p / eps).array().exp().matrix();

    // Support marginal of coupling k before its v update is v_k * K^T u_k.
    double err = 0.0;
    for (std::size_t k = 0; k < num; ++k) {
      const Vector marginal = ((v[k] + ktu[k]) / eps).array().exp().matrix();
      err = std::max(err, (marginal - p).lpNorm<1>());
      v[k] = log_p - ktu[k];
    }
    out.errors.push_back(err);
    if (err <= opts.threshold) {
      out.converged = true;
      break;
    }
  }
  const Vector p = (log_p / eps).array().exp().matrix();
  out.barycenter = p / p.sum();
  return out;
}

}  // namespace otkit
