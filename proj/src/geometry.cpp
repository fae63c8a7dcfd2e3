#include "otkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace otkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pairs above this count get a subsampled mean instead of an exact one.
constexpr double kExactMeanLimit = 1e6;
constexpr int kMeanSamples = 1000;

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("eps must be a positive finite number");
  }
}

void check_length(const Vector& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw std::invalid_argument(std::string(what) + " has length " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(expected));
  }
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + " has non-finite entries");
  }
}

// f or g may carry -inf for zero-mass points, never +inf or NaN.
void check_potential(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i]) || v[i] == kInf) {
      throw std::invalid_argument(std::string(what) +
                                  " has NaN or +inf entries");
    }
  }
}

void check_cap(Eigen::Index n, Eigen::Index m, std::size_t cap) {
  const double entries = static_cast<double>(n) * static_cast<double>(m);
  if (entries > static_cast<double>(cap)) {
    throw std::length_error("refusing to materialize a " + std::to_string(n) +
                            "x" + std::to_string(m) +
                            " cost matrix; use the matrix-free operations");
  }
}

// eps * log sum_t exp((h_t - c_t) / eps) over a strided row of a cost table.
template <typename CostRow>
double lse_row(const Vector& h, const CostRow& c, double eps) {
  double mx = -kInf;
  for (Eigen::Index t = 0; t < h.size(); ++t) {
    mx = std::max(mx, h[t] - c(t));
  }
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (Eigen::Index t = 0; t < h.size(); ++t) {
    s += std::exp((h[t] - c(t) - mx) / eps);
  }
  return mx + eps * std::log(s);
}

}  // namespace

double log_sum_exp(const Eigen::Ref<const Vector>& values) {
  if (values.size() == 0) return -kInf;
  const double mx = values.maxCoeff();
  if (mx == -kInf) return -kInf;
  if (mx == kInf) return kInf;
  return mx + std::log((values.array() - mx).exp().sum());
}

// ---------------------------------------------------------------------------
// EpsilonSchedule

double EpsilonSchedule::at(int iteration) const {
  const double decayed =
      target * init_scale * std::pow(decay, static_cast<double>(iteration));
  return std::max(target, decayed);
}

void EpsilonSchedule::validate() const {
  check_eps(target);
  if (!(init_scale >= 1.0)) {
    throw std::invalid_argument("epsilon schedule init_scale must be >= 1");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("epsilon schedule decay must lie in (0, 1]");
  }
}

// ---------------------------------------------------------------------------
// Geometry

Vector Geometry::apply_kernel(const Vector& v, double eps, Axis axis) const {
  check_eps(eps);
  check_length(v, axis == Axis::kRows ? cols() : rows(), "kernel input");
  check_finite(v, "kernel input");
  return kernel_impl(v, eps, axis);
}

Vector Geometry::apply_lse_kernel(const Vector& f, const Vector& g, double eps,
                                  Axis axis) const {
  check_eps(eps);
  check_length(f, rows(), "f");
  check_length(g, cols(), "g");
  check_potential(f, "f");
  check_potential(g, "g");
  if (axis == Axis::kRows) {
    Vector out = lse_impl(g, eps, Axis::kRows);
    return (out.array() + f.array()).matrix();
  }
  Vector out = lse_impl(f, eps, Axis::kCols);
  return (out.array() + g.array()).matrix();
}

Matrix Geometry::apply_cost(const Matrix& v, Axis axis) const {
  const Eigen::Index expected = axis == Axis::kRows ? cols() : rows();
  if (v.rows() != expected) {
    throw std::invalid_argument("apply_cost: operand has " +
                                std::to_string(v.rows()) + " rows, expected " +
                                std::to_string(expected));
  }
  return cost_impl(v, axis);
}

// ---------------------------------------------------------------------------
// DenseGeometry

DenseGeometry::DenseGeometry(Matrix cost) : cost_(std::move(cost)) {
  if (cost_.rows() < 1 || cost_.cols() < 1) {
    throw std::invalid_argument("cost matrix must be at least 1x1");
  }
  if (!cost_.allFinite()) {
    throw std::invalid_argument("cost matrix has non-finite entries");
  }
}

Matrix DenseGeometry::cost_matrix(std::size_t cap) const {
  check_cap(rows(), cols(), cap);
  return cost_;
}

Vector DenseGeometry::kernel_impl(const Vector& v, double eps,
                                  Axis axis) const {
  const Matrix kernel = (-cost_.array() / eps).exp().matrix();
  if (axis == Axis::kRows) return kernel * v;
  return kernel.transpose() * v;
}

Vector DenseGeometry::lse_impl(const Vector& h, double eps, Axis axis) const {
  if (axis == Axis::kRows) {
    Vector out(rows());
    for (Eigen::Index i = 0; i < rows(); ++i) {
      out[i] = lse_row(h, [&](Eigen::Index t) { return cost_(i, t); }, eps);
    }
    return out;
  }
  Vector out(cols());
  for (Eigen::Index j = 0; j < cols(); ++j) {
    out[j] = lse_row(h, [&](Eigen::Index t) { return cost_(t, j); }, eps);
  }
  return out;
}

Matrix DenseGeometry::cost_impl(const Matrix& v, Axis axis) const {
  if (axis == Axis::kRows) return cost_ * v;
  return cost_.transpose() * v;
}

// ---------------------------------------------------------------------------
// PointCloudGeometry

PointCloudGeometry::PointCloudGeometry(Matrix x, Matrix y, CostFn cost_fn,
                                       Eigen::Index block_rows)
    : x_(std::move(x)),
      y_(std::move(y)),
      cost_fn_(cost_fn),
      block_rows_(block_rows) {
  if (x_.rows() < 1 || y_.rows() < 1) {
    throw std::invalid_argument("point clouds must hold at least one point");
  }
  if (x_.cols() < 1 || x_.cols() != y_.cols()) {
    throw std::invalid_argument("point clouds must share a dimension d >= 1");
  }
  if (!x_.allFinite() || !y_.allFinite()) {
    throw std::invalid_argument("point coordinates must be finite");
  }
  if (block_rows_ < 1) {
    throw std::invalid_argument("block_rows must be >= 1");
  }
  if (cost_fn_ == CostFn::kCosine) {
    if ((x_.rowwise().norm().array() == 0.0).any() ||
        (y_.rowwise().norm().array() == 0.0).any()) {
      throw std::invalid_argument("cosine cost is undefined for zero vectors");
    }
  }
  mean_cost_ = estimate_mean();
}

double PointCloudGeometry::pair_cost(
    const Eigen::Ref<const Eigen::RowVectorXd>& p,
    const Eigen::Ref<const Eigen::RowVectorXd>& q) const {
  switch (cost_fn_) {
    case CostFn::kSqEuclidean:
      return (p - q).squaredNorm();
    case CostFn::kEuclidean:
      return (p - q).norm();
    case CostFn::kCosine:
      return 1.0 - p.dot(q) / (p.norm() * q.norm());
  }
  return 0.0;
}

Matrix PointCloudGeometry::cost_block(const Matrix& src, Eigen::Index begin,
                                      Eigen::Index count,
                                      const Matrix& dst) const {
  Matrix block(count, dst.rows());
  for (Eigen::Index r = 0; r < count; ++r) {
    for (Eigen::Index j = 0; j < dst.rows(); ++j) {
      block(r, j) = pair_cost(src.row(begin + r), dst.row(j));
    }
  }
  return block;
}

double PointCloudGeometry::estimate_mean() const {
  const Eigen::Index n = rows();
  const Eigen::Index m = cols();
  if (static_cast<double>(n) * static_cast<double>(m) <= kExactMeanLimit) {
    double total = 0.0;
    for (Eigen::Index begin = 0; begin < n; begin += block_rows_) {
      const Eigen::Index count = std::min(block_rows_, n - begin);
      total += cost_block(x_, begin, count, y_).sum();
    }
    return total / (static_cast<double>(n) * static_cast<double>(m));
  }
  std::mt19937_64 rng(0);
  std::uniform_int_distribution<Eigen::Index> pick_i(0, n - 1);
  std::uniform_int_distribution<Eigen::Index> pick_j(0, m - 1);
  double total = 0.0;
  for (int s = 0; s < kMeanSamples; ++s) {
    const Eigen::Index i = pick_i(rng);
    const Eigen::Index j = pick_j(rng);
    total += pair_cost(x_.row(i), y_.row(j));
  }
  return total / kMeanSamples;
}

Matrix PointCloudGeometry::cost_matrix(std::size_t cap) const {
  check_cap(rows(), cols(), cap);
  return cost_block(x_, 0, rows(), y_);
}

// Every supported cost is symmetric in its arguments, so the column-side
// queries run the row-side code with the two clouds swapped.
Vector PointCloudGeometry::kernel_impl(const Vector& v, double eps,
                                       Axis axis) const {
  const Matrix& src = axis == Axis::kRows ? x_ : y_;
  const Matrix& dst = axis == Axis::kRows ? y_ : x_;
  Vector out(src.rows());
  for (Eigen::Index begin = 0; begin < src.rows(); begin += block_rows_) {
    const Eigen::Index count = std::min(block_rows_, src.rows() - begin);
    const Matrix block = cost_block(src, begin, count, dst);
    out.segment(begin, count) = (-block.array() / eps).exp().matrix() * v;
  }
  return out;
}

Vector PointCloudGeometry::lse_impl(const Vector& h, double eps,
                                    Axis axis) const {
  const Matrix& src = axis == Axis::kRows ? x_ : y_;
  const Matrix& dst = axis == Axis::kRows ? y_ : x_;
  Vector out(src.rows());
  for (Eigen::Index begin = 0; begin < src.rows(); begin += block_rows_) {
    const Eigen::Index count = std::min(block_rows_, src.rows() - begin);
    const Matrix block = cost_block(src, begin, count, dst);
    for (Eigen::Index r = 0; r < count; ++r) {
      out[begin + r] =
          lse_row(h, [&](Eigen::Index t) { return block(r, t); }, eps);
    }
  }
  return out;
}

Matrix PointCloudGeometry::cost_impl(const Matrix& v, Axis axis) const {
  const Matrix& src = axis == Axis::kRows ? x_ : y_;
  const Matrix& dst = axis == Axis::kRows ? y_ : x_;
  if (cost_fn_ == CostFn::kSqEuclidean) {
    // C = |x|^2 1^T - 2 x y^T + 1 |y|^2^T has rank at most d + 2.
    const Vector src_sq = src.rowwise().squaredNorm();
    const Vector dst_sq = dst.rowwise().squaredNorm();
    Matrix out = src_sq * v.colwise().sum();
    out.noalias() -= 2.0 * src * (dst.transpose() * v);
    out.rowwise() += (dst_sq.transpose() * v);
    return out;
  }
  Matrix out(src.rows(), v.cols());
  for (Eigen::Index begin = 0; begin < src.rows(); begin += block_rows_) {
    const Eigen::Index count = std::min(block_rows_, src.rows() - begin);
    out.middleRows(begin, count) = cost_block(src, begin, count, dst) * v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// GridGeometry

namespace {

struct AxisLayout {
  Eigen::Index outer;
  Eigen::Index len;
  Eigen::Index stride;
};

AxisLayout layout_of(const std::vector<Matrix>& costs, std::size_t k) {
  AxisLayout lay{1, costs[k].rows(), 1};
  for (std::size_t l = 0; l < k; ++l) lay.outer *= costs[l].rows();
  for (std::size_t l = k + 1; l < costs.size(); ++l) lay.stride *= costs[l].rows();
  return lay;
}

// out[o, i, s] = sum_t op(i, t) * in[o, t, s]
Vector contract_axis(const Vector& in, const Matrix& op, const AxisLayout& lay) {
  Vector out(in.size());
  const Eigen::Index block = lay.len * lay.stride;
  for (Eigen::Index o = 0; o < lay.outer; ++o) {
    // A row-major (len x stride) slab is a column-major (stride x len) map.
    Eigen::Map<const Matrix> src(in.data() + o * block, lay.stride, lay.len);
    Eigen::Map<Matrix> dst(out.data() + o * block, lay.stride, lay.len);
    dst.noalias() = src * op.transpose();
  }
  return out;
}

// out[o, i, s] = eps * log sum_t exp((in[o, t, s] - cost(i, t)) / eps)
Vector lse_contract_axis(const Vector& in, const Matrix& cost, double eps,
                         const AxisLayout& lay) {
  Vector out(in.size());
  const Eigen::Index block = lay.len * lay.stride;
  Vector line(lay.len);
  for (Eigen::Index o = 0; o < lay.outer; ++o) {
    for (Eigen::Index s = 0; s < lay.stride; ++s) {
      const Eigen::Index base = o * block + s;
      for (Eigen::Index t = 0; t < lay.len; ++t) line[t] = in[base + t * lay.stride];
      for (Eigen::Index i = 0; i < lay.len; ++i) {
        out[base + i * lay.stride] =
            lse_row(line, [&](Eigen::Index t) { return cost(i, t); }, eps);
      }
    }
  }
  return out;
}

}  // namespace

GridGeometry GridGeometry::from_axes(const std::vector<Vector>& axes) {
  std::vector<Matrix> costs;
  costs.reserve(axes.size());
  for (const Vector& axis : axes) {
    const Eigen::Index n = axis.size();
    Matrix c(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index t = 0; t < n; ++t) {
        const double d = axis[s] - axis[t];
        c(s, t) = d * d;
      }
    }
    costs.push_back(std::move(c));
  }
  return GridGeometry(std::move(costs));
}

GridGeometry::GridGeometry(std::vector<Matrix> axis_costs)
    : axis_costs_(std::move(axis_costs)) {
  if (axis_costs_.empty()) {
    throw std::invalid_argument("grid needs at least one axis");
  }
  for (const Matrix& c : axis_costs_) {
    if (c.rows() < 1 || c.rows() != c.cols()) {
      throw std::invalid_argument("per-axis costs must be square and non-empty");
    }
    if (!c.allFinite()) {
      throw std::invalid_argument("per-axis costs must be finite");
    }
    size_ *= c.rows();
  }
}

std::vector<Eigen::Index> GridGeometry::shape() const {
  std::vector<Eigen::Index> s;
  for (const Matrix& c : axis_costs_) s.push_back(c.rows());
  return s;
}

std::vector<Eigen::Index> GridGeometry::unravel(Eigen::Index flat) const {
  std::vector<Eigen::Index> idx(axis_costs_.size());
  for (std::size_t k = axis_costs_.size(); k-- > 0;) {
    const Eigen::Index n = axis_costs_[k].rows();
    idx[k] = flat % n;
    flat /= n;
  }
  return idx;
}

double GridGeometry::mean_cost() const {
  double total = 0.0;
  for (const Matrix& c : axis_costs_) total += c.mean();
  return total;
}

Matrix GridGeometry::cost_matrix(std::size_t cap) const {
  check_cap(size_, size_, cap);
  std::vector<std::vector<Eigen::Index>> idx(size_);
  for (Eigen::Index i = 0; i < size_; ++i) idx[i] = unravel(i);
  Matrix out(size_, size_);
  for (Eigen::Index i = 0; i < size_; ++i) {
    for (Eigen::Index j = 0; j < size_; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < axis_costs_.size(); ++k) {
        c += axis_costs_[k](idx[i][k], idx[j][k]);
      }
      out(i, j) = c;
    }
  }
  return out;
}

Vector GridGeometry::kernel_impl(const Vector& v, double eps, Axis axis) const {
  Vector t = v;
  for (std::size_t k = 0; k < axis_costs_.size(); ++k) {
    Matrix kernel = (-axis_costs_[k].array() / eps).exp().matrix();
    if (axis == Axis::kCols) kernel.transposeInPlace();
    t = contract_axis(t, kernel, layout_of(axis_costs_, k));
  }
  return t;
}

Vector GridGeometry::lse_impl(const Vector& h, double eps, Axis axis) const {
  Vector t = h;
  for (std::size_t k = 0; k < axis_costs_.size(); ++k) {
    const Matrix cost = axis == Axis::kRows
                            ? axis_costs_[k]
                            : Matrix(axis_costs_[k].transpose());
    t = lse_contract_axis(t, cost, eps, layout_of(axis_costs_, k));
  }
  return t;
}

Matrix GridGeometry::cost_impl(const Matrix& v, Axis axis) const {
  // (C v)_i = sum_k sum_t c_k(i_k, t) * (mass of v on the slice j_k = t)
  Matrix out = Matrix::Zero(size_, v.cols());
  for (std::size_t k = 0; k < axis_costs_.size(); ++k) {
    const AxisLayout lay = layout_of(axis_costs_, k);
    const Matrix& c = axis_costs_[k];
    const Eigen::Index block = lay.len * lay.stride;
    for (Eigen::Index col = 0; col < v.cols(); ++col) {
      Vector marginal = Vector::Zero(lay.len);
      for (Eigen::Index o = 0; o < lay.outer; ++o) {
        for (Eigen::Index t = 0; t < lay.len; ++t) {
          marginal[t] += v.col(col).segment(o * block + t * lay.stride,
                                            lay.stride).sum();
        }
      }
      const Vector w = axis == Axis::kRows ? Vector(c * marginal)
                                           : Vector(c.transpose() * marginal);
      for (Eigen::Index o = 0; o < lay.outer; ++o) {
        for (Eigen::Index i = 0; i < lay.len; ++i) {
          out.col(col).segment(o * block + i * lay.stride, lay.stride).array() +=
              w[i];
        }
      }
    }
  }
  return out;
}

}  // namespace otkit
