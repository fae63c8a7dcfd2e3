#include "otkit/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace otkit::reference {

OracleResult exact_lp_uniform(const Matrix& cost) {
  const Eigen::Index n = cost.rows();
  if (n < 1 || cost.cols() != n) {
    throw std::invalid_argument("exact_lp_uniform needs a square cost matrix");
  }
  if (n > kMaxPermutationSize) {
    throw std::invalid_argument("exact_lp_uniform enumerates n! permutations; n <= 7");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += cost(i, perm[i]);
    total /= static_cast<double>(n);
    if (total < best.value) {
      best.value = total;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.coupling = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    best.coupling(i, best.permutation[i]) = 1.0 / static_cast<double>(n);
  }
  return best;
}

double gw_quartic(const Matrix& cx, const Matrix& cy, const Matrix& p) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index ip = 0; ip < p.rows(); ++ip) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        for (Eigen::Index jp = 0; jp < p.cols(); ++jp) {
          const double d = cx(i, ip) - cy(j, jp);
          total += d * d * p(i, j) * p(ip, jp);
        }
      }
    }
  }
  return total;
}

namespace {

Matrix segment_coupling(double p, const Vector& a, const Vector& b) {
  Matrix out(2, 2);
  out << p, a[0] - p, b[0] - p, 1.0 - a[0] - b[0] + p;
  return out;
}

}  // namespace

OracleResult exact_gw_2x2(const Matrix& cx, const Matrix& cy, const Vector& a,
                          const Vector& b) {
  if (cx.rows() != 2 || cx.cols() != 2 || cy.rows() != 2 || cy.cols() != 2 ||
      a.size() != 2 || b.size() != 2) {
    throw std::invalid_argument("exact_gw_2x2 needs two-point spaces");
  }
  const double lo = std::max(0.0, a[0] + b[0] - 1.0);
  const double hi = std::min(a[0], b[0]);
  if (lo > hi) throw std::invalid_argument("U(a, b) is empty");
  auto objective = [&](double p) {
    return gw_quartic(cx, cy, segment_coupling(p, a, b));
  };

  std::vector<double> candidates = {lo, hi};
  // Fit obj(p) = c2 p^2 + c1 p + c0 through three points.
  const double mid = 0.5 * (lo + hi);
  if (hi > lo) {
    const double f0 = objective(lo);
    const double f1 = objective(mid);
    const double f2 = objective(hi);
    const double h = mid - lo;
    const double c2 = (f2 - 2.0 * f1 + f0) / (2.0 * h * h);
    const double slope_mid = (f2 - f0) / (2.0 * h);
    if (c2 > 0.0) {
      const double stationary = mid - slope_mid / (2.0 * c2);
      if (stationary > lo && stationary < hi) candidates.push_back(stationary);
    }
    for (int k = 0; k <= kGwGridPoints; ++k) {
      candidates.push_back(lo + (hi - lo) * k / kGwGridPoints);
    }
  }

  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (double p : candidates) {
    const double v = objective(p);
    if (v < best.value) {
      best.value = v;
      best.parameter = p;
    }
  }
  best.coupling = segment_coupling(best.parameter, a, b);
  return best;
}

Vector finite_diff(const std::function<double(const Vector&)>& fn,
                   const Vector& point, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff step must be > 0");
  Vector grad(point.size());
  Vector probe = point;
  for (Eigen::Index k = 0; k < point.size(); ++k) {
    probe[k] = point[k] + step;
    const double up = fn(probe);
    probe[k] = point[k] - step;
    const double down = fn(probe);
    probe[k] = point[k];
    grad[k] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace otkit::reference
