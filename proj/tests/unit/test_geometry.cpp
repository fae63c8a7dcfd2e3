#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "otkit/geometry.hpp"
#include "test_support.hpp"

namespace otkit {
namespace {

using testing::Mat;
using testing::Vec;

TEST(Geometry, PointCloudTwoPointCost) {
  Mat x(2, 1);
  x << 0, 1;
  PointCloudGeometry geom(x, x);
  Mat want(2, 2);
  want << 0, 1, 1, 0;
  EXPECT_EQ(geom.cost_matrix(), want);
}

TEST(Geometry, DenseSingleton) {
  DenseGeometry geom(Mat::Constant(1, 1, 3.0));
  EXPECT_EQ(geom.cost_matrix()(0, 0), 3.0);
}

TEST(Geometry, CostFunctionsMatchLoops) {
  std::mt19937_64 rng(1);
  const Mat x = testing::random_matrix(rng, 7, 3);
  const Mat y = testing::random_matrix(rng, 5, 3);
  EXPECT_LT(testing::rel_err(PointCloudGeometry(x, y).cost_matrix(),
                             testing::sq_euclidean(x, y)), 1e-14);
  EXPECT_LT(testing::rel_err(PointCloudGeometry(x, y, CostFn::kEuclidean).cost_matrix(),
                             testing::euclidean(x, y)), 1e-14);
  EXPECT_LT(testing::rel_err(PointCloudGeometry(x, y, CostFn::kCosine).cost_matrix(),
                             testing::cosine(x, y)), 1e-14);
}

TEST(Geometry, CosineRejectsZeroVector) {
  Mat x = Mat::Zero(2, 2);
  x(1, 0) = 1.0;
  EXPECT_THROW(PointCloudGeometry(x, x, CostFn::kCosine), std::invalid_argument);
}

TEST(Geometry, SelfCostSymmetricZeroDiagonal) {
  std::mt19937_64 rng(2);
  const Mat x = testing::random_matrix(rng, 9, 2);
  const Mat c = PointCloudGeometry(x, x).cost_matrix();
  EXPECT_EQ(c, c.transpose());
  EXPECT_EQ(c.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Geometry, MaterializeCap) {
  PointCloudGeometry geom(Mat::Zero(10, 1), Mat::Zero(10, 1));
  EXPECT_THROW(geom.cost_matrix(99), std::length_error);
  EXPECT_NO_THROW(geom.cost_matrix(100));
}

TEST(Geometry, GridMatchesEnumeratedPoints) {
  const std::vector<Vec> axes = {Vec::LinSpaced(2, 0, 1), Vec::LinSpaced(2, 0, 1)};
  const GridGeometry grid = GridGeometry::from_axes(axes);
  const Mat pts = testing::enumerate_grid(axes);
  EXPECT_LT(testing::rel_err(grid.cost_matrix(), testing::sq_euclidean(pts, pts)), 1e-15);
  EXPECT_NEAR(grid.mean_cost(), testing::sq_euclidean(pts, pts).mean(), 1e-15);
}

TEST(Geometry, GridUnravelIsRowMajor) {
  const GridGeometry grid = GridGeometry::from_axes(
      {Vec::LinSpaced(2, 0, 1), Vec::LinSpaced(3, 0, 1), Vec::LinSpaced(4, 0, 1)});
  EXPECT_EQ(grid.rows(), 24);
  EXPECT_EQ(grid.unravel(0), (std::vector<Eigen::Index>{0, 0, 0}));
  EXPECT_EQ(grid.unravel(1), (std::vector<Eigen::Index>{0, 0, 1}));
  EXPECT_EQ(grid.unravel(4), (std::vector<Eigen::Index>{0, 1, 0}));
  EXPECT_EQ(grid.unravel(23), (std::vector<Eigen::Index>{1, 2, 3}));
}

TEST(Geometry, KernelTrivialCases) {
  DenseGeometry single(Mat::Zero(1, 1));
  EXPECT_DOUBLE_EQ(single.apply_kernel(Vec::Ones(1), 0.3, Axis::kRows)(0), 1.0);
  DenseGeometry zeros(Mat::Zero(2, 2));
  EXPECT_EQ(zeros.apply_kernel(Vec::Ones(2), 1.0, Axis::kRows), Vec::Constant(2, 2.0));
  const Vec lse = zeros.apply_lse_kernel(Vec::Zero(2), Vec::Zero(2), 1.0, Axis::kRows);
  EXPECT_DOUBLE_EQ(lse(0), std::log(2.0));
  EXPECT_DOUBLE_EQ(lse(1), std::log(2.0));
}

TEST(Geometry, KernelRejectsNonFinite) {
  DenseGeometry geom(Mat::Zero(2, 2));
  Vec v = Vec::Ones(2);
  v(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(geom.apply_kernel(v, 1.0, Axis::kRows), std::invalid_argument);
  EXPECT_THROW(geom.apply_kernel(Vec::Ones(3), 1.0, Axis::kRows), std::invalid_argument);
  EXPECT_THROW(geom.apply_kernel(Vec::Ones(2), 0.0, Axis::kRows), std::invalid_argument);
}

TEST(Geometry, PointCloudKernelMatchesDense) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat x = testing::random_matrix(rng, 37, 2);
    const Mat y = testing::random_matrix(rng, 23, 2);
    // Block size smaller than n exercises the streaming path.
    PointCloudGeometry geom(x, y, CostFn::kSqEuclidean, 8);
    const Mat c = testing::sq_euclidean(x, y);
    const Vec v = testing::random_matrix(rng, 23, 1, 0, 1);
    const Vec u = testing::random_matrix(rng, 37, 1, 0, 1);
    EXPECT_LT(testing::rel_err(geom.apply_kernel(v, 0.2, Axis::kRows),
                               testing::dense_kernel_rows(c, v, 0.2)), 1e-12);
    EXPECT_LT(testing::rel_err(geom.apply_kernel(u, 0.2, Axis::kCols),
                               testing::dense_kernel_rows(c.transpose(), u, 0.2)), 1e-12);
  }
}

TEST(Geometry, BlockSizeDoesNotChangeResults) {
  std::mt19937_64 rng(4);
  const Mat x = testing::random_matrix(rng, 50, 3);
  const Vec v = testing::random_matrix(rng, 50, 1);
  const Vec f = testing::random_matrix(rng, 50, 1);
  PointCloudGeometry small(x, x, CostFn::kSqEuclidean, 7);
  PointCloudGeometry large(x, x, CostFn::kSqEuclidean, 256);
  EXPECT_EQ(small.apply_lse_kernel(f, v, 0.1, Axis::kRows),
            large.apply_lse_kernel(f, v, 0.1, Axis::kRows));
}

TEST(Geometry, LseMatchesLogOfKernel) {
  std::mt19937_64 rng(5);
  const Mat c = testing::random_matrix(rng, 3, 3, 0, 1);
  DenseGeometry geom(c);
  const Vec f = testing::random_matrix(rng, 3, 1);
  const Vec g = testing::random_matrix(rng, 3, 1);
  const double eps = 0.1;
  const Vec via_kernel =
      f + eps * geom.apply_kernel((g / eps).array().exp().matrix(), eps, Axis::kRows)
                    .array().log().matrix();
  const Vec lse = geom.apply_lse_kernel(f, g, eps, Axis::kRows);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(lse(i), via_kernel(i), 1e-9 * std::abs(via_kernel(i)));
}

TEST(Geometry, LseLargeOffsetsStayFinite) {
  std::mt19937_64 rng(6);
  const Mat x = testing::random_matrix(rng, 6, 2);
  PointCloudGeometry geom(x, x);
  const Vec f = testing::random_matrix(rng, 6, 1);
  const Vec g = testing::random_matrix(rng, 6, 1);
  const Vec base = geom.apply_lse_kernel(f, g, 0.05, Axis::kRows);
  const Vec shifted =
      geom.apply_lse_kernel((f.array() - 1e6).matrix(), g, 0.05, Axis::kRows);
  ASSERT_TRUE(shifted.allFinite());
  EXPECT_LT((shifted.array() + 1e6 - base.array()).abs().maxCoeff(), 1e-6);
}

TEST(Geometry, LseAcceptsMinusInfinity) {
  DenseGeometry geom(Mat::Zero(2, 2));
  Vec g = Vec::Zero(2);
  g(0) = -std::numeric_limits<double>::infinity();
  const Vec out = geom.apply_lse_kernel(Vec::Zero(2), g, 1.0, Axis::kRows);
  EXPECT_DOUBLE_EQ(out(0), 0.0);
}

TEST(Geometry, GridKernelAndLseMatchDense) {
  std::mt19937_64 rng(7);
  const std::vector<Vec> axes = {Vec::LinSpaced(4, 0, 1), Vec::LinSpaced(3, -1, 1),
                                 Vec::LinSpaced(5, 0, 2)};
  const GridGeometry grid = GridGeometry::from_axes(axes);
  const Mat pts = testing::enumerate_grid(axes);
  const Mat c = testing::sq_euclidean(pts, pts);
  const Vec v = testing::random_matrix(rng, 60, 1, 0, 1);
  const Vec f = testing::random_matrix(rng, 60, 1);
  const Vec g = testing::random_matrix(rng, 60, 1);
  EXPECT_LT(testing::rel_err(grid.apply_kernel(v, 0.5, Axis::kRows),
                             testing::dense_kernel_rows(c, v, 0.5)), 1e-12);
  EXPECT_LT(testing::rel_err(grid.apply_lse_kernel(f, g, 0.3, Axis::kRows),
                             testing::dense_lse_rows(c, f, g, 0.3)), 1e-12);
  EXPECT_LT(testing::rel_err(grid.apply_lse_kernel(f, g, 0.3, Axis::kCols),
                             testing::dense_lse_rows(c.transpose(), g, f, 0.3)), 1e-12);
}

TEST(Geometry, ApplyCostMatchesDense) {
  std::mt19937_64 rng(8);
  const Mat x = testing::random_matrix(rng, 11, 3);
  const Mat y = testing::random_matrix(rng, 9, 3);
  const Mat c = testing::sq_euclidean(x, y);
  const Mat v = testing::random_matrix(rng, 9, 2);
  const Mat u = testing::random_matrix(rng, 11, 2);
  PointCloudGeometry geom(x, y);
  EXPECT_LT(testing::rel_err(geom.apply_cost(v, Axis::kRows), c * v), 1e-12);
  EXPECT_LT(testing::rel_err(geom.apply_cost(u, Axis::kCols), c.transpose() * u), 1e-12);
  const GridGeometry grid =
      GridGeometry::from_axes({Vec::LinSpaced(3, 0, 1), Vec::LinSpaced(4, 0, 1)});
  const Mat pts = testing::enumerate_grid({Vec::LinSpaced(3, 0, 1), Vec::LinSpaced(4, 0, 1)});
  const Mat w = testing::random_matrix(rng, 12, 3);
  EXPECT_LT(testing::rel_err(grid.apply_cost(w, Axis::kRows),
                             testing::sq_euclidean(pts, pts) * w), 1e-12);
}

TEST(Geometry, EpsilonDefaultAndSchedule) {
  DenseGeometry geom((Mat(1, 2) << 1.0, 3.0).finished());
  EXPECT_DOUBLE_EQ(geom.epsilon_default(), 0.05 * 2.0);
  const EpsilonSchedule s{0.1, 8.0, 0.5};
  EXPECT_DOUBLE_EQ(s.at(0), 0.8);
  EXPECT_DOUBLE_EQ(s.at(1), 0.4);
  EXPECT_DOUBLE_EQ(s.at(10), 0.1);
  EXPECT_THROW((EpsilonSchedule{0.1, 0.5, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((EpsilonSchedule{0.1, 1.0, 1.5}.validate()), std::invalid_argument);
}

TEST(Geometry, SubsampledMeanIsReasonable) {
  std::mt19937_64 rng(9);
  const Mat x = testing::random_matrix(rng, 1200, 2, 0, 1);
  PointCloudGeometry geom(x, x);
  // Exact mean for uniform [0,1]^2 squared distance is 1/3.
  EXPECT_NEAR(geom.mean_cost(), 1.0 / 3.0, 0.05);
}

}  // namespace
}  // namespace otkit
