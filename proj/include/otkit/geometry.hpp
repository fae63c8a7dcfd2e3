#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace otkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Which side of the n x m cost structure a kernel application reduces over.
// kRows produces a length-n vector (K v), kCols a length-m vector (K^T v).
enum class Axis { kRows, kCols };

enum class CostFn { kSqEuclidean, kEuclidean, kCosine };

// Largest n*m a geometry agrees to materialize as a dense matrix.
inline constexpr std::size_t kDefaultMaterializeCap = std::size_t{1} << 27;

// Relative scale used by epsilon_default().
inline constexpr double kDefaultEpsilonScale = 0.05;

// Entropic regularization that decays geometrically toward a target value:
// eps(t) = max(target, target * init_scale * decay^t).
struct EpsilonSchedule {
  double target = 1.0;
  double init_scale = 1.0;
  double decay = 1.0;

  static EpsilonSchedule constant(double eps) { return {eps, 1.0, 1.0}; }

  double at(int iteration) const;
  void validate() const;
};

// Abstract cost structure c(x_i, y_j) over n sources and m targets.
//
// Implementations answer kernel queries without necessarily storing the
// n x m matrix. Geometries are immutable once constructed.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  // Dense n x m cost table. Throws std::length_error when n*m > cap.
  virtual Matrix cost_matrix(std::size_t cap = kDefaultMaterializeCap) const = 0;

  // K v (kRows, v of length m) or K^T v (kCols, v of length n),
  // with K = exp(-C / eps).
  Vector apply_kernel(const Vector& v, double eps, Axis axis) const;

  // kRows: out_i = eps * log sum_j exp((f_i + g_j - C_ij) / eps)
  // kCols: out_j = eps * log sum_i exp((f_i + g_j - C_ij) / eps)
  // Entries of f or g may be -inf (zero-mass points).
  Vector apply_lse_kernel(const Vector& f, const Vector& g, double eps,
                          Axis axis) const;

  // C V (kRows, V is m x k) or C^T V (kCols, V is n x k).
  Matrix apply_cost(const Matrix& v, Axis axis) const;

  // Mean of all cost entries; may be estimated for large matrix-free backends.
  virtual double mean_cost() const = 0;

  double epsilon_default() const { return kDefaultEpsilonScale * mean_cost(); }

 protected:
  virtual Vector kernel_impl(const Vector& v, double eps, Axis axis) const = 0;
  virtual Vector lse_impl(const Vector& h, double eps, Axis axis) const = 0;
  virtual Matrix cost_impl(const Matrix& v, Axis axis) const = 0;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

class DenseGeometry final : public Geometry {
 public:
  explicit DenseGeometry(Matrix cost);

  Eigen::Index rows() const override { return cost_.rows(); }
  Eigen::Index cols() const override { return cost_.cols(); }
  Matrix cost_matrix(std::size_t cap = kDefaultMaterializeCap) const override;
  double mean_cost() const override { return cost_.mean(); }

  const Matrix& cost() const { return cost_; }

 protected:
  Vector kernel_impl(const Vector& v, double eps, Axis axis) const override;
  Vector lse_impl(const Vector& h, double eps, Axis axis) const override;
  Matrix cost_impl(const Matrix& v, Axis axis) const override;

 private:
  Matrix cost_;
};

// Costs between two point clouds, evaluated on the fly in row blocks.
class PointCloudGeometry final : public Geometry {
 public:
  static constexpr Eigen::Index kDefaultBlockRows = 256;

  PointCloudGeometry(Matrix x, Matrix y, CostFn cost_fn = CostFn::kSqEuclidean,
                     Eigen::Index block_rows = kDefaultBlockRows);

  Eigen::Index rows() const override { return x_.rows(); }
  Eigen::Index cols() const override { return y_.rows(); }
  Matrix cost_matrix(std::size_t cap = kDefaultMaterializeCap) const override;
  double mean_cost() const override { return mean_cost_; }

  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  CostFn cost_fn() const { return cost_fn_; }
  Eigen::Index dimension() const { return x_.cols(); }

 protected:
  Vector kernel_impl(const Vector& v, double eps, Axis axis) const override;
  Vector lse_impl(const Vector& h, double eps, Axis axis) const override;
  Matrix cost_impl(const Matrix& v, Axis axis) const override;

 private:
  // Costs between rows [begin, begin + count) of `src` and every row of `dst`.
  Matrix cost_block(const Matrix& src, Eigen::Index begin, Eigen::Index count,
                    const Matrix& dst) const;
  double pair_cost(const Eigen::Ref<const Eigen::RowVectorXd>& p,
                   const Eigen::Ref<const Eigen::RowVectorXd>& q) const;
  double estimate_mean() const;

  Matrix x_;
  Matrix y_;
  CostFn cost_fn_;
  Eigen::Index block_rows_;
  double mean_cost_ = 0.0;
};

// Cartesian-product grid with a separable cost: the cost between two
// multi-indices is the sum of per-axis costs. Points are numbered in
// row-major order (last axis varies fastest), and couplings on a grid use
// that flat numbering.
class GridGeometry final : public Geometry {
 public:
  // Per-axis cost (s - t)^2 on the given coordinates.
  static GridGeometry from_axes(const std::vector<Vector>& axes);

  explicit GridGeometry(std::vector<Matrix> axis_costs);

  Eigen::Index rows() const override { return size_; }
  Eigen::Index cols() const override { return size_; }
  Matrix cost_matrix(std::size_t cap = kDefaultMaterializeCap) const override;
  double mean_cost() const override;

  std::size_t num_axes() const { return axis_costs_.size(); }
  const std::vector<Matrix>& axis_costs() const { return axis_costs_; }
  std::vector<Eigen::Index> shape() const;

  // Row-major flat index -> per-axis indices.
  std::vector<Eigen::Index> unravel(Eigen::Index flat) const;

 protected:
  Vector kernel_impl(const Vector& v, double eps, Axis axis) const override;
  Vector lse_impl(const Vector& h, double eps, Axis axis) const override;
  Matrix cost_impl(const Matrix& v, Axis axis) const override;

 private:
  std::vector<Matrix> axis_costs_;
  Eigen::Index size_ = 1;
};

// Numerically stable log(sum(exp(values))); -inf for an all -inf input.
double log_sum_exp(const Eigen::Ref<const Vector>& values);

}  // namespace otkit
