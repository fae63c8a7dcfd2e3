#pragma once

#include <optional>
#include <vector>

#include "otkit/problems.hpp"

namespace otkit {

struct SinkhornOptions {
  // Stop once the L1 deviation of the row marginal from a is at most this.
  double threshold = 1e-3;
  int max_iters = 2000;
  // Marginal error is measured every inner_iters iterations.
  int inner_iters = 10;
};

// Initial dual potentials; used by the Gromov-Wasserstein outer loop.
struct WarmStart {
  Vector f;
  Vector g;
};

struct SinkhornOutput {
  Vector f;
  Vector g;
  // L1 row-marginal error at each checkpoint.
  std::vector<double> errors;
  // Dual objective at each checkpoint.
  std::vector<double> dual_objectives;
  int iterations = 0;
  bool converged = false;
  double eps = 0.0;
};

// Log-domain Sinkhorn iterations for the entropic transport problem.
// Each iteration updates f against the row marginal then g against the
// column marginal, so column marginals are exact at every checkpoint.
// Throws SolverError if a potential becomes NaN.
SinkhornOutput solve_sinkhorn(const LinearProblem& prob,
                              const EpsilonSchedule& eps,
                              const SinkhornOptions& opts = {},
                              const std::optional<WarmStart>& init = std::nullopt);

SinkhornOutput solve_sinkhorn(const LinearProblem& prob, double eps,
                              const SinkhornOptions& opts = {},
                              const std::optional<WarmStart>& init = std::nullopt);

// P_ij = exp((f_i + g_j - C_ij) / eps)
Matrix transport_matrix(const SinkhornOutput& out, const LinearProblem& prob);

struct RegOtCost {
  // <C, P>
  double transport_cost = 0.0;
  // <f, a> + <g, b> - eps * (sum(P) - 1); the entropic OT value.
  double dual_objective = 0.0;
};

RegOtCost reg_ot_cost(const SinkhornOutput& out, const LinearProblem& prob);

// Gradient of the entropic OT value with respect to a: the potential f,
// shifted to zero mean. Throws std::invalid_argument if `out` did not converge.
Vector grad_weights(const SinkhornOutput& out, const LinearProblem& prob);

// Gradient of the entropic OT value with respect to the source points of a
// squared-Euclidean point cloud, holding the coupling fixed:
// row i = sum_j P_ij * 2 (x_i - y_j).
Matrix grad_points(const SinkhornOutput& out, const LinearProblem& prob);

// Projects a nonnegative matrix onto U(a, b) exactly: scale down rows and
// columns that exceed their marginal, then add the rank-one correction for
// the remaining deficit.
Matrix round_to_feasible(const Matrix& p, const Vector& a, const Vector& b);

}  // namespace otkit
