#pragma once

#include <optional>
#include <vector>

#include "otkit/problems.hpp"
#include "otkit/sinkhorn.hpp"

namespace otkit {

enum class GwEvaluation {
  // O(n^2 m + n m^2) algebraic expansion.
  kExpansion,
  // Literal quadruple sum; refused above kMaxLiteralSize points per side.
  kLiteral,
};

inline constexpr Eigen::Index kMaxLiteralSize = 8;

// sum_{i,i',j,j'} (Cx_ii' - Cy_jj')^2 P_ij P_i'j'
double gw_objective(const QuadraticProblem& qp, const Matrix& coupling,
                    GwEvaluation mode = GwEvaluation::kExpansion);

// Cost of the linear problem obtained by linearizing the objective at P:
// (Cx.^2) a 1^T + 1 b^T (Cy.^2)^T - 2 Cx P Cy^T.
// Equals half the gradient of gw_objective at couplings in U(a, b).
Matrix gw_linearized_cost(const QuadraticProblem& qp, const Matrix& coupling);

struct GwOptions {
  // Absolute eps for every inner solve; when unset, eps_rel times the mean
  // of the current linearized cost.
  std::optional<double> eps;
  double eps_rel = 1e-2;
  int outer_iters = 20;
  double outer_threshold = 1e-5;
  // Relative size of the perturbation applied to the initial coupling a b^T,
  // which is a stationary point on symmetric problems. 0 starts exactly at
  // a b^T.
  double init_perturbation = 1e-2;
  SinkhornOptions inner;
};

struct GwOutput {
  // Lowest-cost coupling seen over the outer iterations.
  Matrix coupling;
  double gw_cost = 0.0;
  int outer_iterations = 0;
  // gw_objective of the coupling produced by each outer iteration.
  std::vector<double> cost_trace;
  bool converged = false;
};

// a_i b_j (1 + delta u_i v_j), where u and v are index ramps centered under a
// and b. Marginals are exactly a and b, and the swapped problem gets the
// transposed matrix.
Matrix gw_initial_coupling(const Vector& a, const Vector& b, double delta);

// Entropic Gromov-Wasserstein by iterated linearization. Inner solver
// failures are rethrown as SolverError tagged with the outer iteration.
GwOutput solve_gw(const QuadraticProblem& qp, const GwOptions& opts = {});

}  // namespace otkit
