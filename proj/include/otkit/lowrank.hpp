#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "otkit/problems.hpp"

namespace otkit {

// Rank-r coupling P = Q diag(1/g) R^T with Q 1 = a, R 1 = b, Q^T 1 = R^T 1 = g.
struct LowRankFactors {
  Matrix q;
  Matrix r;
  Vector g;

  Eigen::Index rank() const { return g.size(); }
};

struct LowRankOptions {
  // Mirror-descent step; defaults to 10 / max |gradient| at the start.
  std::optional<double> gamma;
  // Relative change of the objective across one check window.
  double threshold = 1e-6;
  int max_iters = 2000;
  int inner_iters = 10;
  std::uint64_t seed = 0;
  // Start for rank < min(n, m): the independent coupling with log-normal
  // noise of this std, drawn from `seed`.
  double init_noise = 0.1;
  // Start for rank == min(n, m): weight of the independent part mixed into
  // the diagonal factor. Deterministic; `seed` is unused.
  double diagonal_mix = 0.1;
  // Newton steps per marginal projection, and the column-sum violation at
  // which a projection stops early.
  int max_projection_steps = 100;
  double projection_tolerance = 1e-13;
};

struct LowRankOutput {
  LowRankFactors factors;
  // Transport cost <C, P> after every outer step (entry 0 is the start).
  std::vector<double> costs;
  // Largest marginal violation after each projection (entry 0 is the start).
  std::vector<double> marginal_errors;
  int iterations = 0;
  bool converged = false;
  double gamma = 0.0;
};

inline constexpr double kMinFactorMass = 1e-10;

LowRankOutput solve_lr_sinkhorn(const LinearProblem& prob, Eigen::Index rank,
                                const LowRankOptions& opts = {});

// Materializes Q diag(1/g) R^T.
Matrix lr_coupling(const LowRankFactors& factors);

// <C, Q diag(1/g) R^T> without forming the coupling.
double lr_transport_cost(const Geometry& geom, const LowRankFactors& factors);

// Max violation over the four marginal identities of the factorization.
double lr_marginal_error(const LowRankFactors& factors, const Vector& a,
                         const Vector& b);

}  // namespace otkit
