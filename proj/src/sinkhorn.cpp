#include "otkit/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace otkit {

namespace {

Vector log_weights(const Vector& w) { return w.array().log().matrix(); }

// <potential, weights> restricted to the support of the weights, so that
// -inf potentials on zero-mass points contribute nothing.
double masked_dot(const Vector& potential, const Vector& weights) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) total += potential[i] * weights[i];
  }
  return total;
}

// NaN or +inf; -inf is legitimate at zero-mass points.
bool broken(const Vector& v) {
  return (v.array().isNaN() || v.array() == std::numeric_limits<double>::infinity()).any();
}

}  // namespace

SinkhornOutput solve_sinkhorn(const LinearProblem& prob,
                              const EpsilonSchedule& eps,
                              const SinkhornOptions& opts,
                              const std::optional<WarmStart>& init) {
  eps.validate();
  if (!(opts.threshold > 0.0)) {
    throw std::invalid_argument("threshold must be positive");
  }
  if (opts.max_iters < 1 || opts.inner_iters < 1) {
    throw std::invalid_argument("max_iters and inner_iters must be >= 1");
  }
  const Geometry& geom = *prob.geom;
  const Eigen::Index n = geom.rows();
  const Eigen::Index m = geom.cols();
  const Vector log_a = log_weights(prob.a);
  const Vector log_b = log_weights(prob.b);
  const Vector zeros_n = Vector::Zero(n);
  const Vector zeros_m = Vector::Zero(m);

  SinkhornOutput out;
  out.f = zeros_n;
  out.g = zeros_m;
  if (init) {
    if (init->f.size() != n || init->g.size() != m) {
      throw std::invalid_argument("warm-start potentials have wrong sizes");
    }
    out.f = init->f;
    out.g = init->g;
    // Zero-mass points carry -inf potentials, which cannot seed an update.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(out.f[i])) out.f[i] = 0.0;
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!std::isfinite(out.g[j])) out.g[j] = 0.0;
    }
  }

  for (int it = 1; it <= opts.max_iters; ++it) {
    const double e = eps.at(it - 1);
    out.eps = e;
    out.iterations = it;
    out.f = e * log_a - geom.apply_lse_kernel(zeros_n, out.g, e, Axis::kRows);
    if (broken(out.f)) {
      throw SolverError("non-finite Sinkhorn potential; eps is likely too small", it);
    }
    out.g = e * log_b - geom.apply_lse_kernel(out.f, zeros_m, e, Axis::kCols);
    if (broken(out.g)) {
      throw SolverError("non-finite Sinkhorn potential; eps is likely too small", it);
    }
    if (it % opts.inner_iters != 0 && it != opts.max_iters) continue;

    const Vector row_log =
        geom.apply_lse_kernel(out.f, out.g, e, Axis::kRows) / e;
    const Vector row = row_log.array().exp().matrix();
    const double err = (row - prob.a).lpNorm<1>();
    const double dual = masked_dot(out.f, prob.a) + masked_dot(out.g, prob.b) -
                        e * (row.sum() - 1.0);
    out.errors.push_back(err);
    out.dual_objectives.push_back(dual);
    if (err <= opts.threshold && e == eps.target) {
      out.converged = true;
      break;
    }
  }
  return out;
}

SinkhornOutput solve_sinkhorn(const LinearProblem& prob, double eps,
                              const SinkhornOptions& opts,
                              const std::optional<WarmStart>& init) {
  return solve_sinkhorn(prob, EpsilonSchedule::constant(eps), opts, init);
}

Matrix transport_matrix(const SinkhornOutput& out, const LinearProblem& prob) {
  const Matrix cost = prob.geom->cost_matrix();
  if (out.f.size() != cost.rows() || out.g.size() != cost.cols()) {
    throw std::invalid_argument("potentials do not match the problem");
  }
  Eigen::ArrayXXd logits = -cost.array();
  logits.colwise() += out.f.array();
  logits.rowwise() += out.g.transpose().array();
  return (logits / out.eps).exp().matrix();
}

RegOtCost reg_ot_cost(const SinkhornOutput& out, const LinearProblem& prob) {
  const Matrix p = transport_matrix(out, prob);
  const Matrix cost = prob.geom->cost_matrix();
  RegOtCost result;
  result.transport_cost = (cost.array() * p.array()).sum();
  result.dual_objective = masked_dot(out.f, prob.a) +
                          masked_dot(out.g, prob.b) -
                          out.eps * (p.sum() - 1.0);
  return result;
}

Vector grad_weights(const SinkhornOutput& out, const LinearProblem& prob) {
  if (!out.converged) {
    throw std::invalid_argument(
        "grad_weights requires a converged Sinkhorn output");
  }
  if (out.f.size() != prob.a.size()) {
    throw std::invalid_argument("potentials do not match the problem");
  }
  if (!out.f.allFinite()) {
    throw std::invalid_argument(
        "gradient is unbounded at zero-mass source points");
  }
  return (out.f.array() - out.f.mean()).matrix();
}

Matrix grad_points(const SinkhornOutput& out, const LinearProblem& prob) {
  if (!out.converged) {
    throw std::invalid_argument(
        "grad_points requires a converged Sinkhorn output");
  }
  const auto* cloud = dynamic_cast<const PointCloudGeometry*>(prob.geom.get());
  if (cloud == nullptr || cloud->cost_fn() != CostFn::kSqEuclidean) {
    throw std::invalid_argument(
        "grad_points supports squared-Euclidean point clouds only");
  }
  const Matrix p = transport_matrix(out, prob);
  const Vector row_mass = p.rowwise().sum();
  return 2.0 * (row_mass.asDiagonal() * cloud->x() - p * cloud->y());
}

Matrix round_to_feasible(const Matrix& p, const Vector& a, const Vector& b) {
  if (p.rows() != a.size() || p.cols() != b.size()) {
    throw std::invalid_argument("round_to_feasible: size mismatch");
  }
  Matrix x = p.cwiseMax(0.0);
  const Vector rows = x.rowwise().sum();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (rows[i] > a[i]) x.row(i) *= a[i] / rows[i];
  }
  const Vector cols = x.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (cols[j] > b[j]) x.col(j) *= b[j] / cols[j];
  }
  const Vector err_r = (a - x.rowwise().sum()).cwiseMax(0.0);
  const Vector err_c = (b - x.colwise().sum().transpose()).cwiseMax(0.0);
  const double mass = err_r.sum();
  if (mass > 0.0) x.noalias() += err_r * err_c.transpose() / mass;
  return x;
}

}  // namespace otkit
