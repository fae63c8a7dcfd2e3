#include "otkit/quadratic.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace otkit {

namespace {

void check_coupling(const QuadraticProblem& qp, const Matrix& coupling) {
  if (coupling.rows() != qp.n() || coupling.cols() != qp.m()) {
    throw std::invalid_argument("coupling is not conformable with the problem");
  }
}

double literal_objective(const Matrix& cx, const Matrix& cy, const Matrix& p) {
  const Eigen::Index n = p.rows();
  const Eigen::Index m = p.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index ip = 0; ip < n; ++ip) {
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index jp = 0; jp < m; ++jp) {
          const double d = cx(i, ip) - cy(j, jp);
          total += d * d * p(i, j) * p(ip, jp);
        }
      }
    }
  }
  return total;
}

// Centered, unit-sup-norm ramp over the indices of w.
Vector centered_ramp(const Vector& w) {
  const Vector ramp = Vector::LinSpaced(w.size(), 0.0, 1.0);
  Vector u = (ramp.array() - ramp.dot(w)).matrix();
  const double scale = u.lpNorm<Eigen::Infinity>();
  if (scale > 0.0) u /= scale;
  return u;
}

}  // namespace

Matrix gw_initial_coupling(const Vector& a, const Vector& b, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("init_perturbation must lie in [0, 1)");
  }
  const Vector u = centered_ramp(a);
  const Vector v = centered_ramp(b);
  Matrix out = a * b.transpose();
  out.array() *= (1.0 + delta * (u * v.transpose()).array());
  return out;
}

double gw_objective(const QuadraticProblem& qp, const Matrix& coupling,
                    GwEvaluation mode) {
  check_coupling(qp, coupling);
  const Matrix cx = qp.geom_x->cost_matrix();
  const Matrix cy = qp.geom_y->cost_matrix();
  if (mode == GwEvaluation::kLiteral) {
    if (qp.n() > kMaxLiteralSize || qp.m() > kMaxLiteralSize) {
      throw std::invalid_argument("literal GW evaluation is limited to 8 points");
    }
    return literal_objective(cx, cy, coupling);
  }
  // Expand (u - v)^2 = u^2 + v^2 - 2uv; the squared terms only see the
  // marginals of the coupling.
  const Vector p = coupling.rowwise().sum();
  const Vector q = coupling.colwise().sum().transpose();
  const Matrix cx2 = cx.array().square().matrix();
  const Matrix cy2 = cy.array().square().matrix();
  const double cross =
      (coupling.array() * (cx * coupling * cy.transpose()).array()).sum();
  return p.dot(cx2 * p) + q.dot(cy2 * q) - 2.0 * cross;
}

Matrix gw_linearized_cost(const QuadraticProblem& qp, const Matrix& coupling) {
  check_coupling(qp, coupling);
  const Matrix cx = qp.geom_x->cost_matrix();
  const Matrix cy = qp.geom_y->cost_matrix();
  const Vector left = cx.array().square().matrix() * qp.a;
  const Vector right = cy.array().square().matrix() * qp.b;
  Matrix out = -2.0 * cx * coupling * cy.transpose();
  out.colwise() += left;
  out.rowwise() += right.transpose();
  return out;
}

GwOutput solve_gw(const QuadraticProblem& qp, const GwOptions& opts) {
  if (opts.outer_iters < 1) {
    throw std::invalid_argument("outer_iters must be >= 1");
  }
  if (!(opts.outer_threshold >= 0.0)) {
    throw std::invalid_argument("outer_threshold must be nonnegative");
  }
  if (opts.eps && !(*opts.eps > 0.0)) {
    throw std::invalid_argument("eps must be positive");
  }
  if (!opts.eps && !(opts.eps_rel > 0.0)) {
    throw std::invalid_argument("eps_rel must be positive");
  }

  Matrix coupling = gw_initial_coupling(qp.a, qp.b, opts.init_perturbation);
  std::optional<WarmStart> warm;
  GwOutput out;
  double best = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= opts.outer_iters; ++t) {
    const Matrix lin = gw_linearized_cost(qp, coupling);
    double eps = 0.0;
    if (opts.eps) {
      eps = *opts.eps;
    } else {
      const double scale = lin.mean();
      // A zero linearized cost leaves every coupling optimal.
      eps = scale > 0.0 ? opts.eps_rel * scale : opts.eps_rel;
    }
    const LinearProblem inner(std::make_shared<DenseGeometry>(lin), qp.a, qp.b);
    SinkhornOutput sol;
    try {
      sol = solve_sinkhorn(inner, eps, opts.inner, warm);
    } catch (const SolverError& e) {
      throw SolverError(std::string("inner solve failed at outer step: ") +
                            e.what(),
                        t);
    }
    coupling = transport_matrix(sol, inner);
    warm = WarmStart{sol.f, sol.g};

    const double cost = gw_objective(qp, coupling);
    out.cost_trace.push_back(cost);
    out.outer_iterations = t;
    if (cost < best) {
      best = cost;
      out.coupling = coupling;
      out.gw_cost = cost;
    }
    if (t > 1) {
      const double prev = out.cost_trace[out.cost_trace.size() - 2];
      if (std::abs(cost - prev) <= opts.outer_threshold * (1.0 + std::abs(cost))) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace otkit
