#pragma once

#include <functional>
#include <vector>

#include "otkit/geometry.hpp"

namespace otkit::reference {

// Slow, exhaustive oracles for checking the solvers on tiny inputs.

inline constexpr Eigen::Index kMaxPermutationSize = 7;
inline constexpr int kGwGridPoints = 10000;

struct OracleResult {
  double value = 0.0;
  // exact_lp_uniform: the optimal permutation (i -> permutation[i]).
  std::vector<Eigen::Index> permutation;
  // exact_gw_2x2: the optimal P(0, 0); the rest of P follows from a and b.
  double parameter = 0.0;
  Matrix coupling;
};

// min over permutations s of (1/n) sum_i C(i, s(i)); the optimum of the
// uniform-marginal transport LP, attained at a vertex of the Birkhoff polytope.
OracleResult exact_lp_uniform(const Matrix& cost);

// Exact Gromov-Wasserstein optimum for two-point spaces. U(a, b) is the
// segment P(p) = [[p, a0 - p], [b0 - p, 1 - a0 - b0 + p]] and the objective is
// quadratic in p; endpoints and the stationary point are compared, and a dense
// grid search confirms.
OracleResult exact_gw_2x2(const Matrix& cx, const Matrix& cy, const Vector& a,
                          const Vector& b);

// Literal quadruple-sum GW objective.
double gw_quartic(const Matrix& cx, const Matrix& cy, const Matrix& coupling);

// Central differences, one coordinate at a time.
Vector finite_diff(const std::function<double(const Vector&)>& fn,
                   const Vector& point, double step);

}  // namespace otkit::reference
