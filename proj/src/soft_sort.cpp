#include "otkit/soft_sort.hpp"

#include <memory>
#include <stdexcept>

#include "otkit/sinkhorn.hpp"

namespace otkit {

namespace {

Vector squash(const Vector& x, Squash mode) {
  if (mode == Squash::kNone) return x;
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (hi == lo) return Vector::Constant(x.size(), 0.5);
  return ((x.array() - lo) / (hi - lo)).matrix();
}

Vector targets(Eigen::Index m) {
  if (m == 1) return Vector::Constant(1, 0.5);
  return Vector::LinSpaced(m, 0.0, 1.0);
}

// Entropic coupling between the squashed inputs and m sorted targets.
Matrix sort_coupling(const Vector& x, Eigen::Index m, const SoftSortSpec& spec) {
  if (x.size() < 1) throw std::invalid_argument("soft sort of an empty vector");
  if (!x.allFinite()) throw std::invalid_argument("soft sort inputs must be finite");
  if (m < 1) throw std::invalid_argument("num_targets must be >= 1");
  if (!(spec.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const Matrix src = squash(x, spec.squash);
  const Matrix dst = targets(m);
  auto geom = std::make_shared<PointCloudGeometry>(src, dst);
  const LinearProblem prob(geom);
  SinkhornOptions opts;
  opts.threshold = spec.threshold;
  opts.max_iters = spec.max_iters;
  const SinkhornOutput out = solve_sinkhorn(prob, spec.eps, opts);
  return transport_matrix(out, prob);
}

}  // namespace

Vector soft_sort(const Vector& x, const SoftSortSpec& spec) {
  const Eigen::Index m = spec.num_targets.value_or(x.size());
  const Matrix p = sort_coupling(x, m, spec);
  return static_cast<double>(m) * (p.transpose() * x);
}

Vector soft_rank(const Vector& x, const SoftSortSpec& spec) {
  const Eigen::Index n = x.size();
  const Matrix p = sort_coupling(x, n, spec);
  const Vector ranks = Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  return static_cast<double>(n) * (p * ranks);
}

}  // namespace otkit
