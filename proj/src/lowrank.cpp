#include "otkit/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace otkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Factors kept as logarithms; zero-mass rows are -inf.
struct LogFactors {
  Matrix q;
  Matrix r;
  Vector g;

  LowRankFactors exp() const {
    return {q.array().exp().matrix(), r.array().exp().matrix(),
            g.array().exp().matrix()};
  }
};

// One factor with its rows fitted to a marginal, for column scalings lambda:
// F_ik = w_i * xi_ik e^{lambda_k} / sum_l xi_il e^{lambda_l}.
struct FittedFactor {
  Matrix log_f;
  Matrix f;
  // sum_i w_i log sum_k xi_ik e^{lambda_k}
  double potential = 0.0;
};

FittedFactor fit_rows(const Matrix& log_xi, const Vector& log_w,
                      const Vector& w, const Vector& lambda) {
  FittedFactor out;
  out.log_f = log_xi;
  out.log_f.rowwise() += lambda.transpose();
  for (Eigen::Index i = 0; i < log_xi.rows(); ++i) {
    if (w[i] == 0.0) {
      out.log_f.row(i).setConstant(-kInf);
      continue;
    }
    const double s = log_sum_exp(out.log_f.row(i).transpose());
    out.potential += w[i] * s;
    out.log_f.row(i).array() += log_w[i] - s;
  }
  out.f = out.log_f.array().exp().matrix();
  return out;
}

struct ProjectionPoint {
  FittedFactor q;
  FittedFactor r;
  Vector log_g;
  Vector g;
  double value = 0.0;
  Vector grad;
};

// KL projection of (xi_q, xi_r, xi_g) onto {Q 1 = a, R 1 = b,
// Q^T 1 = R^T 1 = g}. With the row constraints solved in closed form, the
// dual in the column scalings (lambda, mu) is the convex function
//   sum_i a_i lse_k(log xi_q + lambda) + sum_j b_j lse_k(log xi_r + mu)
//     + sum_k xi_g e^{-lambda - mu},
// whose gradient is (Q^T 1 - g, R^T 1 - g). Minimized by damped Newton.
class Projector {
 public:
  Projector(const Vector& a, const Vector& b, const LowRankOptions& opts)
      : a_(a), b_(b), log_a_(a.array().log().matrix()),
        log_b_(b.array().log().matrix()), opts_(opts) {}

  LogFactors operator()(const LogFactors& xi) const {
    const Eigen::Index r = xi.g.size();
    Vector x = Vector::Zero(2 * r);
    ProjectionPoint cur = evaluate(xi, x);
    for (int step = 0; step < opts_.max_projection_steps; ++step) {
      if (cur.grad.lpNorm<Eigen::Infinity>() <= opts_.projection_tolerance) {
        break;
      }
      const Matrix h = hessian(cur);
      // The dual is flat along (lambda, mu) = (c, -c); a tiny ridge fixes it.
      const double ridge = 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
      const Vector dir =
          -(h + ridge * Matrix::Identity(2 * r, 2 * r)).ldlt().solve(cur.grad);
      const double slope = cur.grad.dot(dir);
      if (!(slope < 0.0)) break;
      double t = 1.0;
      bool moved = false;
      for (int half = 0; half < 60; ++half, t *= 0.5) {
        ProjectionPoint next = evaluate(xi, x + t * dir);
        if (next.value <= cur.value + 1e-4 * t * slope) {
          x += t * dir;
          cur = std::move(next);
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    return {cur.q.log_f, cur.r.log_f, cur.log_g};
  }

 private:
  ProjectionPoint evaluate(const LogFactors& xi, const Vector& x) const {
    const Eigen::Index r = xi.g.size();
    const Vector lambda = x.head(r);
    const Vector mu = x.tail(r);
    ProjectionPoint p;
    p.q = fit_rows(xi.q, log_a_, a_, lambda);
    p.r = fit_rows(xi.r, log_b_, b_, mu);
    p.log_g = xi.g - lambda - mu;
    p.g = p.log_g.array().exp().matrix();
    p.value = p.q.potential + p.r.potential + p.g.sum();
    p.grad.resize(2 * r);
    p.grad.head(r) = p.q.f.colwise().sum().transpose() - p.g;
    p.grad.tail(r) = p.r.f.colwise().sum().transpose() - p.g;
    return p;
  }

  Matrix hessian(const ProjectionPoint& p) const {
    const Eigen::Index r = p.g.size();
    Matrix h(2 * r, 2 * r);
    h.topLeftCorner(r, r) = block(p.q.f, a_);
    h.bottomRightCorner(r, r) = block(p.r.f, b_);
    h.topRightCorner(r, r).setZero();
    h.bottomLeftCorner(r, r).setZero();
    for (Eigen::Index k = 0; k < r; ++k) {
      h(k, k) += p.g[k];
      h(r + k, r + k) += p.g[k];
      h(k, r + k) = p.g[k];
      h(r + k, k) = p.g[k];
    }
    return h;
  }

  // diag(F^T 1) - F^T diag(1/w) F over rows with positive mass.
  static Matrix block(const Matrix& f, const Vector& w) {
    Vector inv_w = Vector::Zero(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (w[i] > 0.0) inv_w[i] = 1.0 / w[i];
    }
    Matrix out = -f.transpose() * inv_w.asDiagonal() * f;
    out.diagonal() += f.colwise().sum().transpose();
    return out;
  }

  const Vector& a_;
  const Vector& b_;
  Vector log_a_;
  Vector log_b_;
  const LowRankOptions& opts_;
};

struct Gradients {
  Matrix q;
  Matrix r;
  Vector g;
  double cost = 0.0;
};

Gradients gradients(const Geometry& geom, const LowRankFactors& f) {
  const Matrix cr = geom.apply_cost(f.r, Axis::kRows);
  const Matrix ctq = geom.apply_cost(f.q, Axis::kCols);
  const Vector inv_g = f.g.cwiseInverse();
  const Vector omega = (f.q.array() * cr.array()).colwise().sum().transpose();
  Gradients out;
  out.q = cr * inv_g.asDiagonal();
  out.r = ctq * inv_g.asDiagonal();
  out.g = -(omega.array() * inv_g.array().square()).matrix();
  out.cost = omega.dot(inv_g);
  return out;
}

// Full-rank start on the short side (say rank == n): Q = (1 - t) diag(a) +
// t a 1^T / r, g = Q^T 1, R = b g^T. At t = 0 every coupling is P = R^T for
// some feasible R, so the cost is linear in R; the mix keeps logs finite.
LogFactors diagonal_start(const Vector& a, const Vector& b, bool rows_short, double t) {
  const Vector& w = rows_short ? a : b;
  const Vector& other = rows_short ? b : a;
  const Eigen::Index r = w.size();
  Matrix side = (t / static_cast<double>(r)) * w * Vector::Ones(r).transpose();
  side.diagonal() += (1.0 - t) * w;
  const Vector g = side.colwise().sum().transpose();
  const Matrix far = other * g.transpose();
  LogFactors out;
  out.g = g.array().log().matrix();
  out.q = (rows_short ? side : far).array().log().matrix();
  out.r = (rows_short ? far : side).array().log().matrix();
  return out;
}

bool has_nan(const LogFactors& f) {
  return f.q.array().isNaN().any() || f.r.array().isNaN().any() ||
         f.g.array().isNaN().any();
}

}  // namespace

LowRankOutput solve_lr_sinkhorn(const LinearProblem& prob, Eigen::Index rank,
                                const LowRankOptions& opts) {
  const Geometry& geom = *prob.geom;
  const Eigen::Index n = geom.rows();
  const Eigen::Index m = geom.cols();
  if (rank < 1 || rank > std::min(n, m)) {
    throw std::invalid_argument("rank must lie in [1, min(n, m)]");
  }
  if (opts.gamma && !(*opts.gamma > 0.0)) {
    throw std::invalid_argument("gamma must be positive");
  }
  if (!(opts.threshold > 0.0) || opts.max_iters < 1 || opts.inner_iters < 1 ||
      opts.max_projection_steps < 1 || !(opts.init_noise >= 0.0) ||
      !(opts.diagonal_mix > 0.0 && opts.diagonal_mix <= 1.0)) {
    throw std::invalid_argument("invalid low-rank solver options");
  }
  const Vector log_a = prob.a.array().log().matrix();
  const Vector log_b = prob.b.array().log().matrix();

  LogFactors state;
  if (rank == n || rank == m) {
    state = diagonal_start(prob.a, prob.b, rank == n, opts.diagonal_mix);
  } else {
    // Log-normal perturbation of the independent coupling with uniform g.
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> noise(0.0, opts.init_noise);
    state.g = Vector::Constant(rank, -std::log(static_cast<double>(rank)));
    state.q.resize(n, rank);
    state.r.resize(m, rank);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < rank; ++k) {
        state.q(i, k) = log_a[i] + state.g[k] + noise(rng);
      }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < rank; ++k) {
        state.r(j, k) = log_b[j] + state.g[k] + noise(rng);
      }
    }
  }
  const Projector project(prob.a, prob.b, opts);
  state = project(state);

  LowRankOutput out;
  LowRankFactors factors = state.exp();
  out.marginal_errors.push_back(lr_marginal_error(factors, prob.a, prob.b));
  Gradients grad = gradients(geom, factors);
  out.costs.push_back(grad.cost);

  if (opts.gamma) {
    out.gamma = *opts.gamma;
  } else {
    const double scale = std::max({grad.q.cwiseAbs().maxCoeff(),
                                   grad.r.cwiseAbs().maxCoeff(),
                                   grad.g.cwiseAbs().maxCoeff()});
    out.gamma = scale > 0.0 ? 10.0 / scale : 1.0;
  }
  const double log_floor = std::log(kMinFactorMass);

  for (int it = 1; it <= opts.max_iters; ++it) {
    state.q -= out.gamma * grad.q;
    state.r -= out.gamma * grad.r;
    state.g -= out.gamma * grad.g;
    state.g = state.g.cwiseMax(log_floor);
    state = project(state);
    if (has_nan(state)) {
      throw SolverError("NaN in low-rank factors; gamma is likely too large",
                        it);
    }
    factors = state.exp();
    out.marginal_errors.push_back(lr_marginal_error(factors, prob.a, prob.b));
    grad = gradients(geom, factors);
    out.costs.push_back(grad.cost);
    out.iterations = it;

    if (it % opts.inner_iters == 0) {
      const double now = out.costs.back();
      const double before = out.costs[out.costs.size() - 1 - opts.inner_iters];
      if (std::abs(now - before) <= opts.threshold * std::abs(now)) {
        out.converged = true;
        break;
      }
    }
  }
  out.factors = std::move(factors);
  return out;
}

Matrix lr_coupling(const LowRankFactors& factors) {
  if (factors.q.cols() != factors.g.size() ||
      factors.r.cols() != factors.g.size()) {
    throw std::invalid_argument("low-rank factors have inconsistent rank");
  }
  if ((factors.g.array() <= 0.0).any()) {
    throw std::invalid_argument("low-rank factor g must be positive");
  }
  return factors.q * factors.g.cwiseInverse().asDiagonal() *
         factors.r.transpose();
}

double lr_transport_cost(const Geometry& geom, const LowRankFactors& factors) {
  const Matrix cr = geom.apply_cost(factors.r, Axis::kRows);
  const Vector omega =
      (factors.q.array() * cr.array()).colwise().sum().transpose();
  return omega.dot(factors.g.cwiseInverse());
}

double lr_marginal_error(const LowRankFactors& f, const Vector& a,
                         const Vector& b) {
  const double e_a = (f.q.rowwise().sum() - a).lpNorm<Eigen::Infinity>();
  const double e_b = (f.r.rowwise().sum() - b).lpNorm<Eigen::Infinity>();
  const double e_q =
      (f.q.colwise().sum().transpose() - f.g).lpNorm<Eigen::Infinity>();
  const double e_r =
      (f.r.colwise().sum().transpose() - f.g).lpNorm<Eigen::Infinity>();
  return std::max({e_a, e_b, e_q, e_r});
}

}  // namespace otkit
