#include <gtest/gtest.h>

#include <filesystem>
#include <memory>

#include "cli_io.hpp"
#include "cli_runner.hpp"
#include "commands.hpp"
#include "otkit/otkit.hpp"

namespace otkit {
namespace {

using testing::fixture;
using testing::run_cli;
using testing::ScratchDir;

std::vector<double> as_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

TEST(CliIo, ParseCsvCommentsAndBlankLines) {
  const Matrix m = cli::parse_csv("# header\n1, 2\n\n3,4 # trailing\n", "inline");
  ASSERT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 1), 4.0);
}

TEST(CliIo, ParseCsvRowMismatch) {
  try {
    cli::parse_csv("1,2\n3\n", "f.csv");
    FAIL();
  } catch (const cli::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("f.csv:2"), std::string::npos);
  }
}

TEST(CliIo, ParseCsvFullPrecision) {
  const Matrix m = cli::parse_csv("0.1000000000000000055511151231257827\n", "x");
  EXPECT_EQ(m(0, 0), 0.1);
  EXPECT_THROW(cli::parse_csv("1,abc\n", "x"), cli::InputError);
  EXPECT_THROW(cli::parse_csv("nan\n", "x"), cli::InputError);
  EXPECT_THROW(cli::parse_csv("# only a comment\n", "x"), cli::InputError);
}

TEST(CliIo, NormalizeWeights) {
  Vector w(2);
  w << 0.5, 0.5 + 5e-7;
  EXPECT_NEAR(cli::normalize_weights(w, "w").sum(), 1.0, 1e-15);
  w << 0.5, 0.6;
  EXPECT_THROW(cli::normalize_weights(w, "w"), cli::InputError);
  w << 1.5, -0.5;
  EXPECT_THROW(cli::normalize_weights(w, "w"), cli::InputError);
}

TEST(CliIo, InlineList) {
  const Vector v = cli::parse_inline_list("1, 5,4 8");
  EXPECT_EQ(as_list(v), (std::vector<double>{1, 5, 4, 8}));
  EXPECT_THROW(cli::parse_inline_list(" , "), cli::InputError);
}

TEST(CliIo, FormatCsvRoundTrips) {
  Matrix m(2, 2);
  m << 0.1, 1.0 / 3.0, -2e-300, 12345.678901234567;
  EXPECT_EQ(cli::parse_csv(cli::format_csv(m), "x"), m);
}

TEST(CliIo, WriteAtomicLeavesNoTemp) {
  ScratchDir dir;
  cli::write_atomic(dir.file("a.txt"), "hello");
  EXPECT_EQ(testing::slurp(dir.file("a.txt")), "hello");
  EXPECT_FALSE(std::filesystem::exists(dir.file("a.txt.tmp")));
  EXPECT_THROW(cli::write_atomic(dir.file("missing/a.txt"), "x"), cli::InputError);
}

TEST(CliIo, GmmJson) {
  const auto doc = nlohmann::json::parse(
      R"({"weights":[0.5,0.5],"means":[[0],[1]],"covs":[[[1]],[[2]]]})");
  const GaussianMixture m = cli::parse_gmm(doc);
  EXPECT_EQ(m.size(), 2);
  EXPECT_EQ(m.components[1].cov(0, 0), 2.0);
  EXPECT_THROW(cli::parse_gmm(nlohmann::json::parse(R"({"weights":[1]})")), cli::InputError);
}

// ---------------------------------------------------------------------------

TEST(CliRoundTrip, LinSinkhorn) {
  ScratchDir dir;
  const auto run = run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") +
                           " --eps-rel 1e-3 --coupling-out " + dir.file("p.csv"));
  ASSERT_EQ(run.exit_code, 0);
  const auto j = run.json();

  const LinearProblem prob(std::make_shared<PointCloudGeometry>(
      cli::read_csv(fixture("x2.csv")), cli::read_csv(fixture("y2.csv"))));
  const SinkhornOutput out = solve_sinkhorn(prob, 1e-3 * prob.geom->mean_cost());
  const RegOtCost cost = reg_ot_cost(out, prob);
  EXPECT_EQ(j["transport_cost"].get<double>(), cost.transport_cost);
  EXPECT_EQ(j["dual_objective"].get<double>(), cost.dual_objective);
  EXPECT_EQ(j["iterations"].get<int>(), out.iterations);
  EXPECT_EQ(j["eps"].get<double>(), out.eps);
  EXPECT_EQ(j["converged"].get<bool>(), out.converged);
  EXPECT_NEAR(cost.transport_cost, 0.625, 1e-2);
  EXPECT_EQ(cli::read_csv(dir.file("p.csv")), transport_matrix(out, prob));
}

TEST(CliRoundTrip, LinLowRank) {
  const auto run = run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") +
                           " --solver lr --rank 1 --seed 5");
  ASSERT_EQ(run.exit_code, 0);
  const LinearProblem prob(std::make_shared<PointCloudGeometry>(
      cli::read_csv(fixture("x2.csv")), cli::read_csv(fixture("y2.csv"))));
  LowRankOptions opts;
  opts.seed = 5;
  const LowRankOutput out = solve_lr_sinkhorn(prob, 1, opts);
  const double cost = lr_transport_cost(*prob.geom, out.factors);
  EXPECT_EQ(run.json()["transport_cost"].get<double>(), cost);
  EXPECT_NEAR(cost, prob.a.dot(prob.geom->cost_matrix() * prob.b), 1e-6);
}

TEST(CliRoundTrip, LinIdenticalSinglePoints) {
  const auto run = run_cli("lin " + fixture("one.csv") + " " + fixture("one.csv"));
  ASSERT_EQ(run.exit_code, 0);
  EXPECT_EQ(run.json()["transport_cost"].get<double>(), 0.0);
}

TEST(CliRoundTrip, LinVerify) {
  const auto run =
      run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --eps-rel 1e-3 --verify");
  ASSERT_EQ(run.exit_code, 0);
  const auto j = run.json();
  EXPECT_EQ(j["verify"]["value"].get<double>(), 0.625);
  EXPECT_LT(std::abs(j["verify"]["gap"].get<double>()), 1e-2);
}

TEST(CliRoundTrip, QuadTwoPoint) {
  ScratchDir dir;
  const auto run = run_cli("quad " + fixture("pair_x.csv") + " " + fixture("pair_y.csv") +
                           " --cost eucl --verify --correspondence-out " + dir.file("c.csv"));
  ASSERT_EQ(run.exit_code, 0);
  const auto j = run.json();
  auto gx = std::make_shared<PointCloudGeometry>(cli::read_csv(fixture("pair_x.csv")),
                                                 cli::read_csv(fixture("pair_x.csv")),
                                                 CostFn::kEuclidean);
  auto gy = std::make_shared<PointCloudGeometry>(cli::read_csv(fixture("pair_y.csv")),
                                                 cli::read_csv(fixture("pair_y.csv")),
                                                 CostFn::kEuclidean);
  const GwOutput out = solve_gw(QuadraticProblem(gx, gy));
  EXPECT_EQ(j["gw_cost"].get<double>(), out.gw_cost);
  EXPECT_EQ(j["cost_trace"].get<std::vector<double>>(), out.cost_trace);
  EXPECT_NEAR(out.gw_cost, 0.5, 0.05);
  const Matrix corr = cli::read_csv(dir.file("c.csv"));
  ASSERT_EQ(corr.rows(), 2);
  EXPECT_EQ(corr.cols(), 3);
}

TEST(CliRoundTrip, QuadRotatedSpiral) {
  ScratchDir dir;
  const auto run = run_cli("quad " + fixture("spiral_x.csv") + " " + fixture("spiral_y.csv") +
                           " --correspondence-out " + dir.file("c.csv"));
  ASSERT_TRUE(run.exit_code == 0 || run.exit_code == 2);
  EXPECT_EQ(run.exit_code, run.json()["converged"].get<bool>() ? 0 : 2);
  const Matrix corr = cli::read_csv(dir.file("c.csv"));
  double matched = 0.0;
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    if (corr(i, 1) == corr(i, 0)) matched += 1.0;
  }
  EXPECT_GE(matched / static_cast<double>(corr.rows()), 0.8);
}

TEST(CliRoundTrip, BarycenterGridAndSupport) {
  ScratchDir dir;
  const std::string hists = fixture("dirac25.csv") + " " + fixture("dirac75.csv");
  const auto grid = run_cli("barycenter " + hists + " --grid " + fixture("axis101.csv") +
                            " --eps 1e-3 --barycenter-out " + dir.file("b.csv"));
  ASSERT_EQ(grid.exit_code, 0);
  const std::vector<Vector> hs = {cli::read_vector(fixture("dirac25.csv")),
                                  cli::read_vector(fixture("dirac75.csv"))};
  auto geom = std::make_shared<GridGeometry>(
      GridGeometry::from_axes({cli::read_vector(fixture("axis101.csv"))}));
  const BarycenterOutput out = solve_barycenter(BarycenterProblem(geom, hs), 1e-3);
  EXPECT_EQ(grid.json()["barycenter"].get<std::vector<double>>(), as_list(out.barycenter));
  EXPECT_EQ(cli::read_vector(dir.file("b.csv")), out.barycenter);
  Eigen::Index k = 0;
  out.barycenter.maxCoeff(&k);
  EXPECT_EQ(k, 50);

  const auto dense = run_cli("barycenter " + hists + " --support " + fixture("support101.csv") +
                             " --eps 1e-3 --weights 0.3,0.7");
  ASSERT_EQ(dense.exit_code, 0);
  const Matrix s = cli::read_csv(fixture("support101.csv"));
  Vector w(2);
  w << 0.3, 0.7;
  const BarycenterOutput dout = solve_barycenter(
      BarycenterProblem(std::make_shared<PointCloudGeometry>(s, s), hs, w), 1e-3);
  EXPECT_EQ(dense.json()["barycenter"].get<std::vector<double>>(), as_list(dout.barycenter));
}

TEST(CliRoundTrip, BarycenterLengthMismatch) {
  const auto run = run_cli("barycenter " + fixture("half.csv") + " --grid " +
                           fixture("axis101.csv"));
  EXPECT_EQ(run.exit_code, 1);
}

TEST(CliRoundTrip, SoftSort) {
  ScratchDir dir;
  const auto run = run_cli("softsort --values 1,5,4,8,12 --eps 1e-3 --eps-sweep 1e-3,1,1000"
                           " --sweep-out " + dir.file("s.csv"));
  ASSERT_EQ(run.exit_code, 0);
  const auto j = run.json();
  const Vector x = cli::parse_inline_list("1,5,4,8,12");
  SoftSortSpec spec;
  spec.eps = 1e-3;
  EXPECT_EQ(j["sorted_values"].get<std::vector<double>>(), as_list(soft_sort(x, spec)));
  EXPECT_EQ(j["ranks"].get<std::vector<double>>(), as_list(soft_rank(x, spec)));
  ASSERT_EQ(j["sweep"].size(), 3u);
  const Matrix table = cli::read_csv(dir.file("s.csv"));
  EXPECT_EQ(table.rows(), 3);
  EXPECT_EQ(table.cols(), 6);

  const auto file_run = run_cli("softsort " + fixture("values.csv") + " --eps 1e-3");
  ASSERT_EQ(file_run.exit_code, 0);
  EXPECT_EQ(file_run.json()["sorted_values"], j["sorted_values"]);

  const auto single = run_cli("softsort --values 7");
  ASSERT_EQ(single.exit_code, 0);
  EXPECT_EQ(single.json()["sorted_values"].get<std::vector<double>>(), std::vector<double>{7.0});
}

TEST(CliRoundTrip, Gmm) {
  const auto run = run_cli("gmm " + fixture("gmm_a.json") + " " + fixture("gmm_b.json"));
  ASSERT_EQ(run.exit_code, 0);
  const GmmDistance d =
      gmm_distance(cli::read_gmm(fixture("gmm_a.json")), cli::read_gmm(fixture("gmm_b.json")));
  EXPECT_EQ(run.json()["value"].get<double>(), d.value);
  EXPECT_NEAR(d.value, 5.0, 1e-6);

  const auto self = run_cli("gmm " + fixture("gmm_c.json") + " " + fixture("gmm_c.json"));
  ASSERT_EQ(self.exit_code, 0);
  EXPECT_LE(self.json()["value"].get<double>(), 1e-6);
}

TEST(CliExitCodes, InputErrors) {
  ScratchDir dir;
  const std::string bad = dir.write("bad.csv", "1,2\n3\n");
  EXPECT_EQ(run_cli("lin " + bad + " " + fixture("x2.csv")).exit_code, 1);
  const std::string w = dir.write("w.csv", "0.5\n0.6\n");
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --a " + w).exit_code,
            1);
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv")).exit_code, 1);
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --eps -1").exit_code,
            1);
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --solver lr")
                .exit_code,
            1);
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --cost nope")
                .exit_code,
            1);
  EXPECT_EQ(run_cli("lin missing.csv " + fixture("y2.csv")).exit_code, 1);
  EXPECT_EQ(run_cli("").exit_code, 1);
}

TEST(CliExitCodes, NearSimplexWeightsAreRescaled) {
  ScratchDir dir;
  const std::string w = dir.write("w.csv", "0.5\n0.5000004\n");
  EXPECT_EQ(run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --a " + w).exit_code,
            0);
}

TEST(CliExitCodes, NotConverged) {
  const auto run =
      run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --eps 1e-3 --max-iters 3");
  EXPECT_EQ(run.exit_code, 2);
  EXPECT_FALSE(run.json()["converged"].get<bool>());
}

TEST(CliExitCodes, SummaryWrittenAtomically) {
  ScratchDir dir;
  const auto run = run_cli("lin " + fixture("x2.csv") + " " + fixture("y2.csv") + " --out " +
                           dir.file("s.json"));
  ASSERT_EQ(run.exit_code, 0);
  EXPECT_TRUE(run.out.empty());
  EXPECT_TRUE(nlohmann::json::parse(testing::slurp(dir.file("s.json"))).contains("transport_cost"));
  EXPECT_FALSE(std::filesystem::exists(dir.file("s.json.tmp")));
}

}  // namespace
}  // namespace otkit
