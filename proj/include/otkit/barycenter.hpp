#pragma once

#include <vector>

#include "otkit/problems.hpp"

namespace otkit {

// K histograms on a shared, fixed support of N points.
struct BarycenterProblem {
  BarycenterProblem(GeometryPtr geom, std::vector<Vector> histograms,
                    Vector weights);
  // Equal weights 1/K.
  BarycenterProblem(GeometryPtr geom, std::vector<Vector> histograms);

  GeometryPtr geom;
  std::vector<Vector> histograms;
  Vector weights;
};

struct BarycenterOptions {
  double threshold = 1e-4;
  int max_iters = 1000;
};

struct BarycenterOutput {
  Vector barycenter;
  bool converged = false;
  int iterations = 0;
  // max_k L1 gap between the k-th coupling's support marginal and p.
  std::vector<double> errors;
};

// Entropic barycenter by iterative Bregman projections in the log domain.
// Histograms may contain zeros. Throws SolverError on NaN.
BarycenterOutput solve_barycenter(const BarycenterProblem& bp, double eps,
                                  const BarycenterOptions& opts = {});

}  // namespace otkit
