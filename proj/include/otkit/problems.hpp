#pragma once

#include <stdexcept>
#include <string>

#include "otkit/geometry.hpp"

namespace otkit {

// Raised when an iterative solver produces NaN potentials or factors,
// typically because eps (or a step size) is too small for the cost scale.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Tolerance on |sum(a) - 1| accepted for marginal histograms.
inline constexpr double kSimplexTolerance = 1e-8;

// Throws std::invalid_argument unless w is a nonnegative vector summing to 1.
void validate_histogram(const Vector& w, const char* what,
                        double tolerance = kSimplexTolerance);

Vector uniform_weights(Eigen::Index n);

// Transport between two weighted point sets under the cost held by `geom`.
struct LinearProblem {
  LinearProblem(GeometryPtr geom, Vector a, Vector b);

  // Uniform marginals.
  explicit LinearProblem(GeometryPtr geom);

  GeometryPtr geom;
  Vector a;
  Vector b;
};

// Gromov-Wasserstein matching between two spaces known only through their
// intra-space costs, with squared discrepancy between cost entries.
struct QuadraticProblem {
  QuadraticProblem(GeometryPtr geom_x, GeometryPtr geom_y, Vector a, Vector b);
  QuadraticProblem(GeometryPtr geom_x, GeometryPtr geom_y);

  Eigen::Index n() const { return a.size(); }
  Eigen::Index m() const { return b.size(); }

  GeometryPtr geom_x;
  GeometryPtr geom_y;
  Vector a;
  Vector b;
};

}  // namespace otkit
