#pragma once

#include <optional>

#include "otkit/geometry.hpp"

namespace otkit {

enum class Squash {
  // Affine map of the inputs onto [0, 1]; constant inputs map to 0.5.
  kMinMaxRescale,
  kNone,
};

struct SoftSortSpec {
  // Number of sorted targets; defaults to the input length.
  std::optional<Eigen::Index> num_targets;
  // Regularization in squashed units.
  double eps = 1e-2;
  Squash squash = Squash::kMinMaxRescale;
  double threshold = 1e-9;
  int max_iters = 20000;
};

// Soft order statistics: entropic OT from the (squashed) inputs to equally
// spaced targets in [0, 1], then the barycentric projection of the original
// values onto each target. Nondecreasing; tends to sort(x) as eps -> 0 and
// to mean(x) as eps -> infinity.
Vector soft_sort(const Vector& x, const SoftSortSpec& spec = {});

// Soft ranks in [0, n - 1]: each input's expected target rank under the
// same coupling with n targets. Ignores spec.num_targets.
Vector soft_rank(const Vector& x, const SoftSortSpec& spec = {});

}  // namespace otkit
