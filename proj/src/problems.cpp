#include "otkit/problems.hpp"

#include <cmath>

namespace otkit {

void validate_histogram(const Vector& w, const char* what, double tolerance) {
  if (w.size() < 1) {
    throw std::invalid_argument(std::string(what) + " is empty");
  }
  if (!w.allFinite() || (w.array() < 0.0).any()) {
    throw std::invalid_argument(std::string(what) +
                                " must be finite and nonnegative");
  }
  if (std::abs(w.sum() - 1.0) > tolerance) {
    throw std::invalid_argument(std::string(what) + " must sum to 1 (sums to " +
                                std::to_string(w.sum()) + ")");
  }
}

Vector uniform_weights(Eigen::Index n) {
  return Vector::Constant(n, 1.0 / static_cast<double>(n));
}

LinearProblem::LinearProblem(GeometryPtr geom_, Vector a_, Vector b_)
    : geom(std::move(geom_)), a(std::move(a_)), b(std::move(b_)) {
  if (!geom) throw std::invalid_argument("linear problem needs a geometry");
  if (a.size() != geom->rows() || b.size() != geom->cols()) {
    throw std::invalid_argument("marginal sizes do not match the geometry");
  }
  validate_histogram(a, "a");
  validate_histogram(b, "b");
}

LinearProblem::LinearProblem(GeometryPtr geom_)
    : LinearProblem(geom_, uniform_weights(geom_ ? geom_->rows() : 0),
                    uniform_weights(geom_ ? geom_->cols() : 0)) {}

QuadraticProblem::QuadraticProblem(GeometryPtr gx, GeometryPtr gy, Vector a_,
                                   Vector b_)
    : geom_x(std::move(gx)),
      geom_y(std::move(gy)),
      a(std::move(a_)),
      b(std::move(b_)) {
  if (!geom_x || !geom_y) {
    throw std::invalid_argument("quadratic problem needs two geometries");
  }
  if (geom_x->rows() != geom_x->cols() || geom_y->rows() != geom_y->cols()) {
    throw std::invalid_argument("intra-space geometries must be square");
  }
  if (a.size() != geom_x->rows() || b.size() != geom_y->rows()) {
    throw std::invalid_argument("marginal sizes do not match the geometries");
  }
  validate_histogram(a, "a");
  validate_histogram(b, "b");
}

QuadraticProblem::QuadraticProblem(GeometryPtr gx, GeometryPtr gy)
    : QuadraticProblem(gx, gy, uniform_weights(gx ? gx->rows() : 0),
                       uniform_weights(gy ? gy->rows() : 0)) {}

}  // namespace otkit
