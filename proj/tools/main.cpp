#include <cstdlib>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli_io.hpp"
#include "commands.hpp"
#include "otkit/problems.hpp"

namespace {

using namespace otkit::cli;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("otkit");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("OTKIT_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void add_eps(CLI::App* cmd, EpsilonFlags& eps) {
  cmd->add_option("--eps", eps.eps, "Absolute entropic regularization");
  cmd->add_option("--eps-rel", eps.eps_rel, "Regularization relative to the mean cost");
}

void add_output(CLI::App* cmd, OutputFlags& out) {
  cmd->add_option("--out", out.out, "JSON summary path (default stdout)");
  cmd->add_option("--coupling-out", out.coupling_out, "Write the coupling as CSV");
}

const std::vector<std::string> kCosts = {"sqeucl", "eucl", "cosine"};

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"otkit: entropic and low-rank optimal transport solvers"};
  app.require_subcommand(1);

  LinConfig lin;
  auto* lin_cmd = app.add_subcommand("lin", "Linear OT between two point clouds");
  lin_cmd->add_option("points", lin.point_files, "Two point CSV files (x, y)")
      ->expected(0, 2);
  lin_cmd->add_option("--cost-matrix", lin.cost_matrix_file, "Dense cost matrix CSV");
  lin_cmd->add_option("--a", lin.a_file, "Source weights CSV");
  lin_cmd->add_option("--b", lin.b_file, "Target weights CSV");
  lin_cmd->add_option("--cost", lin.cost)->check(CLI::IsMember(kCosts));
  add_eps(lin_cmd, lin.eps);
  lin_cmd->add_option("--solver", lin.solver)
      ->check(CLI::IsMember({"sinkhorn", "lr"}));
  lin_cmd->add_option("--rank", lin.rank, "Coupling rank for --solver lr");
  lin_cmd->add_option("--threshold", lin.threshold);
  lin_cmd->add_option("--max-iters", lin.max_iters);
  lin_cmd->add_option("--seed", lin.seed);
  lin_cmd->add_flag("--verify", lin.verify, "Compare against the exact LP oracle");
  add_output(lin_cmd, lin.output);

  QuadConfig quad;
  auto* quad_cmd = app.add_subcommand("quad", "Gromov-Wasserstein between two point clouds");
  quad_cmd->add_option("points", quad.point_files, "Two point CSV files")
      ->expected(2)
      ->required();
  quad_cmd->add_option("--a", quad.a_file);
  quad_cmd->add_option("--b", quad.b_file);
  quad_cmd->add_option("--cost", quad.cost)->check(CLI::IsMember(kCosts));
  add_eps(quad_cmd, quad.eps);
  quad_cmd->add_option("--outer-iters", quad.outer_iters);
  quad_cmd->add_option("--threshold", quad.threshold, "Inner Sinkhorn threshold");
  quad_cmd->add_option("--max-iters", quad.max_iters, "Inner Sinkhorn iteration cap");
  quad_cmd->add_flag("--verify", quad.verify, "Compare against the 2x2 oracle");
  quad_cmd->add_option("--correspondence-out", quad.correspondence_out,
                       "Row-argmax pairs as CSV (i,j,mass)");
  add_output(quad_cmd, quad.output);

  BarycenterConfig bary;
  auto* bary_cmd = app.add_subcommand("barycenter", "Fixed-support entropic barycenter");
  bary_cmd->add_option("histograms", bary.histogram_files, "Histogram CSV files")
      ->required();
  bary_cmd->add_option("--support", bary.support_file, "Support points CSV");
  bary_cmd->add_option("--grid", bary.grid_files, "One coordinate file per grid axis");
  bary_cmd->add_option("--weights", bary.weights, "Inline barycentric weights");
  bary_cmd->add_option("--cost", bary.cost)->check(CLI::IsMember(kCosts));
  add_eps(bary_cmd, bary.eps);
  bary_cmd->add_option("--threshold", bary.threshold);
  bary_cmd->add_option("--max-iters", bary.max_iters);
  bary_cmd->add_option("--barycenter-out", bary.barycenter_out, "Barycenter CSV");
  bary_cmd->add_option("--out", bary.output.out);

  SoftSortConfig sort;
  auto* sort_cmd = app.add_subcommand("softsort", "Soft sort and soft rank");
  sort_cmd->add_option("values_file", sort.values_file, "One-column values file");
  sort_cmd->add_option("--values", sort.values, "Inline list, e.g. 1,5,4");
  sort_cmd->add_option("--eps", sort.eps);
  sort_cmd->add_option("--num-targets", sort.num_targets);
  sort_cmd->add_option("--eps-sweep", sort.eps_sweep, "Inline list of eps values");
  sort_cmd->add_option("--sweep-out", sort.sweep_out, "Sweep table CSV (eps, values...)");
  sort_cmd->add_option("--out", sort.output.out);

  GmmConfig gmm;
  auto* gmm_cmd = app.add_subcommand("gmm", "OT distance between Gaussian mixtures");
  gmm_cmd->add_option("mixtures", gmm.gmm_files, "Two GMM JSON files")
      ->expected(2)
      ->required();
  gmm_cmd->add_option("--eps-rel", gmm.eps_rel);
  add_output(gmm_cmd, gmm.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    CommandResult result;
    if (lin_cmd->parsed()) result = run_lin(lin);
    if (quad_cmd->parsed()) result = run_quad(quad);
    if (bary_cmd->parsed()) result = run_barycenter(bary);
    if (sort_cmd->parsed()) result = run_softsort(sort);
    if (gmm_cmd->parsed()) result = run_gmm(gmm);
    if (result.exit_code == kExitNotConverged) {
      spdlog::warn("solver stopped at the iteration cap without converging");
    }
    return result.exit_code;
  } catch (const otkit::SolverError& e) {
    spdlog::error("{}", e.what());
    return kExitNotConverged;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitInputError;
  } catch (const std::length_error& e) {
    spdlog::error("{}", e.what());
    return kExitInputError;
  }
}
