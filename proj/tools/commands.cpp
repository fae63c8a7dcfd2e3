#include "commands.hpp"

#include <iostream>
#include <memory>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cli_io.hpp"
#include "otkit/otkit.hpp"

namespace otkit::cli {

namespace {

using nlohmann::json;

std::vector<double> to_list(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(to_list(m.row(i).transpose()));
  }
  return rows;
}

CostFn parse_cost(const std::string& name) {
  if (name == "sqeucl") return CostFn::kSqEuclidean;
  if (name == "eucl") return CostFn::kEuclidean;
  if (name == "cosine") return CostFn::kCosine;
  throw InputError("unknown cost '" + name + "' (sqeucl, eucl, cosine)");
}

void require_positive(const std::optional<double>& v, const char* flag) {
  if (v && !(*v > 0.0)) throw InputError(std::string(flag) + " must be > 0");
}

void require_at_least_one(const std::optional<int>& v, const char* flag) {
  if (v && *v < 1) throw InputError(std::string(flag) + " must be >= 1");
}

void validate_eps(const EpsilonFlags& flags) {
  if (flags.eps && flags.eps_rel) {
    throw InputError("--eps and --eps-rel are mutually exclusive");
  }
  require_positive(flags.eps, "--eps");
  require_positive(flags.eps_rel, "--eps-rel");
}

double resolve_eps(const EpsilonFlags& flags, const Geometry& geom) {
  double eps = geom.epsilon_default();
  if (flags.eps) eps = *flags.eps;
  if (flags.eps_rel) eps = *flags.eps_rel * geom.mean_cost();
  if (!(eps > 0.0)) {
    // All costs are zero, so every coupling is optimal.
    spdlog::info("mean cost is zero; using eps = 1");
    eps = 1.0;
  }
  return eps;
}

Vector weights_or_uniform(const std::string& file, Eigen::Index n,
                          const std::string& what) {
  if (file.empty()) return uniform_weights(n);
  Vector w = normalize_weights(read_vector(file), what);
  if (w.size() != n) {
    throw InputError(what + " has " + std::to_string(w.size()) +
                     " entries, expected " + std::to_string(n));
  }
  return w;
}

void write_coupling(const Matrix& p, const std::string& path) {
  if (!path.empty()) write_atomic(path, format_csv(p));
}

bool is_uniform(const Vector& w) {
  return (w.array() == 1.0 / static_cast<double>(w.size())).all();
}

}  // namespace

void emit_summary(const json& summary, const OutputFlags& output) {
  const std::string text = summary.dump(2) + "\n";
  if (output.out.empty()) {
    std::cout << text;
  } else {
    write_atomic(output.out, text);
  }
}

// ---------------------------------------------------------------------------

CommandResult run_lin(const LinConfig& cfg) {
  validate_eps(cfg.eps);
  require_positive(cfg.threshold, "--threshold");
  require_at_least_one(cfg.max_iters, "--max-iters");
  if (cfg.solver != "sinkhorn" && cfg.solver != "lr") {
    throw InputError("--solver must be sinkhorn or lr");
  }
  if (cfg.solver == "lr" && !cfg.rank) {
    throw InputError("--solver lr requires --rank");
  }

  GeometryPtr geom;
  if (!cfg.cost_matrix_file.empty()) {
    if (!cfg.point_files.empty()) {
      throw InputError("give either two point files or --cost-matrix, not both");
    }
    geom = std::make_shared<DenseGeometry>(read_csv(cfg.cost_matrix_file));
  } else {
    if (cfg.point_files.size() != 2) {
      throw InputError("lin needs two point files (or --cost-matrix)");
    }
    geom = std::make_shared<PointCloudGeometry>(read_csv(cfg.point_files[0]),
                                                read_csv(cfg.point_files[1]),
                                                parse_cost(cfg.cost));
  }
  if (cfg.rank && (*cfg.rank < 1 || *cfg.rank > std::min(geom->rows(), geom->cols()))) {
    throw InputError("--rank must lie in [1, min(n, m)]");
  }
  const LinearProblem prob(geom, weights_or_uniform(cfg.a_file, geom->rows(), "a"),
                           weights_or_uniform(cfg.b_file, geom->cols(), "b"));

  CommandResult result;
  json& s = result.summary;
  s["command"] = "lin";
  s["solver"] = cfg.solver;
  s["n"] = geom->rows();
  s["m"] = geom->cols();
  double transport_cost = 0.0;
  Matrix coupling;

  if (cfg.solver == "sinkhorn") {
    const double eps = resolve_eps(cfg.eps, *geom);
    SinkhornOptions opts;
    if (cfg.threshold) opts.threshold = *cfg.threshold;
    if (cfg.max_iters) opts.max_iters = *cfg.max_iters;
    spdlog::info("sinkhorn: n={} m={} eps={:.6g}", geom->rows(), geom->cols(), eps);
    const SinkhornOutput out = solve_sinkhorn(prob, eps, opts);
    const RegOtCost cost = reg_ot_cost(out, prob);
    transport_cost = cost.transport_cost;
    s["transport_cost"] = cost.transport_cost;
    s["dual_objective"] = cost.dual_objective;
    s["iterations"] = out.iterations;
    s["converged"] = out.converged;
    s["eps"] = out.eps;
    result.exit_code = out.converged ? kExitOk : kExitNotConverged;
    if (!cfg.output.coupling_out.empty()) coupling = transport_matrix(out, prob);
  } else {
    LowRankOptions opts;
    if (cfg.threshold) opts.threshold = *cfg.threshold;
    if (cfg.max_iters) opts.max_iters = *cfg.max_iters;
    opts.seed = cfg.seed;
    spdlog::info("lr sinkhorn: n={} m={} rank={}", geom->rows(), geom->cols(), *cfg.rank);
    const LowRankOutput out = solve_lr_sinkhorn(prob, *cfg.rank, opts);
    transport_cost = lr_transport_cost(*geom, out.factors);
    s["transport_cost"] = transport_cost;
    s["rank"] = *cfg.rank;
    s["iterations"] = out.iterations;
    s["converged"] = out.converged;
    s["gamma"] = out.gamma;
    s["seed"] = cfg.seed;
    result.exit_code = out.converged ? kExitOk : kExitNotConverged;
    if (!cfg.output.coupling_out.empty()) coupling = lr_coupling(out.factors);
  }

  if (cfg.verify) {
    if (geom->rows() == geom->cols() &&
        geom->rows() <= reference::kMaxPermutationSize && is_uniform(prob.a) &&
        is_uniform(prob.b)) {
      const auto oracle = reference::exact_lp_uniform(geom->cost_matrix());
      s["verify"] = {{"oracle", "exact_lp_uniform"},
                     {"value", oracle.value},
                     {"gap", transport_cost - oracle.value}};
    } else {
      s["verify"] = {{"skipped", "needs n == m <= 7 with uniform weights"}};
    }
  }
  write_coupling(coupling, cfg.output.coupling_out);
  emit_summary(s, cfg.output);
  return result;
}

// ---------------------------------------------------------------------------

CommandResult run_quad(const QuadConfig& cfg) {
  validate_eps(cfg.eps);
  require_positive(cfg.threshold, "--threshold");
  require_at_least_one(cfg.max_iters, "--max-iters");
  require_at_least_one(cfg.outer_iters, "--outer-iters");
  if (cfg.point_files.size() != 2) throw InputError("quad needs two point files");

  const CostFn cost_fn = parse_cost(cfg.cost);
  const Matrix x = read_csv(cfg.point_files[0]);
  const Matrix y = read_csv(cfg.point_files[1]);
  auto gx = std::make_shared<PointCloudGeometry>(x, x, cost_fn);
  auto gy = std::make_shared<PointCloudGeometry>(y, y, cost_fn);
  const QuadraticProblem qp(gx, gy, weights_or_uniform(cfg.a_file, x.rows(), "a"),
                            weights_or_uniform(cfg.b_file, y.rows(), "b"));

  GwOptions opts;
  if (cfg.eps.eps) opts.eps = *cfg.eps.eps;
  if (cfg.eps.eps_rel) opts.eps_rel = *cfg.eps.eps_rel;
  if (cfg.outer_iters) opts.outer_iters = *cfg.outer_iters;
  if (cfg.threshold) opts.inner.threshold = *cfg.threshold;
  if (cfg.max_iters) opts.inner.max_iters = *cfg.max_iters;
  spdlog::info("gromov-wasserstein: n={} m={}", x.rows(), y.rows());
  const GwOutput out = solve_gw(qp, opts);

  CommandResult result;
  json& s = result.summary;
  s["command"] = "quad";
  s["n"] = x.rows();
  s["m"] = y.rows();
  s["gw_cost"] = out.gw_cost;
  s["cost_trace"] = out.cost_trace;
  s["outer_iterations"] = out.outer_iterations;
  s["converged"] = out.converged;
  result.exit_code = out.converged ? kExitOk : kExitNotConverged;

  if (cfg.verify) {
    if (x.rows() == 2 && y.rows() == 2) {
      const auto oracle = reference::exact_gw_2x2(
          gx->cost_matrix(), gy->cost_matrix(), qp.a, qp.b);
      s["verify"] = {{"oracle", "exact_gw_2x2"},
                     {"value", oracle.value},
                     {"gap", out.gw_cost - oracle.value}};
    } else {
      s["verify"] = {{"skipped", "needs two points per space"}};
    }
  }
  write_coupling(out.coupling, cfg.output.coupling_out);
  if (!cfg.correspondence_out.empty()) {
    std::ostringstream text;
    text.precision(17);
    text << "# i,j,mass\n";
    for (Eigen::Index i = 0; i < out.coupling.rows(); ++i) {
      Eigen::Index j = 0;
      const double mass = out.coupling.row(i).maxCoeff(&j);
      text << i << ',' << j << ',' << mass << '\n';
    }
    write_atomic(cfg.correspondence_out, text.str());
  }
  emit_summary(s, cfg.output);
  return result;
}

// ---------------------------------------------------------------------------

CommandResult run_barycenter(const BarycenterConfig& cfg) {
  validate_eps(cfg.eps);
  require_positive(cfg.threshold, "--threshold");
  require_at_least_one(cfg.max_iters, "--max-iters");
  if (cfg.histogram_files.empty()) {
    throw InputError("barycenter needs at least one histogram file");
  }
  if (cfg.support_file.empty() == cfg.grid_files.empty()) {
    throw InputError("give exactly one of --support or --grid");
  }

  GeometryPtr geom;
  if (!cfg.grid_files.empty()) {
    if (cfg.cost != "sqeucl") throw InputError("--grid supports --cost sqeucl only");
    std::vector<Vector> axes;
    for (const std::string& f : cfg.grid_files) axes.push_back(read_vector(f));
    geom = std::make_shared<GridGeometry>(GridGeometry::from_axes(axes));
  } else {
    const Matrix support = read_csv(cfg.support_file);
    geom = std::make_shared<PointCloudGeometry>(support, support, parse_cost(cfg.cost));
  }

  std::vector<Vector> hists;
  for (const std::string& f : cfg.histogram_files) {
    Vector h = normalize_weights(read_vector(f), "histogram " + f);
    if (h.size() != geom->rows()) {
      throw InputError("histogram " + f + " has " + std::to_string(h.size()) +
                       " entries but the support has " +
                       std::to_string(geom->rows()) + " points");
    }
    hists.push_back(std::move(h));
  }
  const auto k = static_cast<Eigen::Index>(hists.size());
  Vector weights = uniform_weights(k);
  if (!cfg.weights.empty()) {
    weights = normalize_weights(parse_inline_list(cfg.weights), "--weights");
    if (weights.size() != k) throw InputError("--weights needs one entry per histogram");
  }
  const BarycenterProblem bp(geom, std::move(hists), weights);
  const double eps = resolve_eps(cfg.eps, *geom);
  BarycenterOptions opts;
  if (cfg.threshold) opts.threshold = *cfg.threshold;
  if (cfg.max_iters) opts.max_iters = *cfg.max_iters;
  spdlog::info("barycenter: N={} K={} eps={:.6g}", geom->rows(), k, eps);
  const BarycenterOutput out = solve_barycenter(bp, eps, opts);

  CommandResult result;
  json& s = result.summary;
  s["command"] = "barycenter";
  s["barycenter"] = to_list(out.barycenter);
  s["iterations"] = out.iterations;
  s["converged"] = out.converged;
  s["eps"] = eps;
  result.exit_code = out.converged ? kExitOk : kExitNotConverged;
  if (!cfg.barycenter_out.empty()) {
    write_atomic(cfg.barycenter_out, format_csv(out.barycenter));
  }
  emit_summary(s, cfg.output);
  return result;
}

// ---------------------------------------------------------------------------

CommandResult run_softsort(const SoftSortConfig& cfg) {
  if (cfg.values.empty() == cfg.values_file.empty()) {
    throw InputError("give exactly one of --values or a values file");
  }
  if (!(cfg.eps > 0.0)) throw InputError("--eps must be > 0");
  require_at_least_one(cfg.num_targets, "--num-targets");
  const Vector x = cfg.values.empty() ? read_vector(cfg.values_file)
                                      : parse_inline_list(cfg.values);
  std::vector<double> sweep;
  if (!cfg.eps_sweep.empty()) {
    const Vector e = parse_inline_list(cfg.eps_sweep);
    if ((e.array() <= 0.0).any()) throw InputError("--eps-sweep values must be > 0");
    sweep = to_list(e);
  }

  SoftSortSpec spec;
  spec.eps = cfg.eps;
  if (cfg.num_targets) spec.num_targets = *cfg.num_targets;

  CommandResult result;
  json& s = result.summary;
  s["command"] = "softsort";
  s["eps"] = cfg.eps;
  s["sorted_values"] = to_list(soft_sort(x, spec));
  s["ranks"] = to_list(soft_rank(x, spec));
  if (!sweep.empty()) {
    json rows = json::array();
    Matrix table(static_cast<Eigen::Index>(sweep.size()),
                 1 + spec.num_targets.value_or(x.size()));
    for (std::size_t r = 0; r < sweep.size(); ++r) {
      SoftSortSpec at = spec;
      at.eps = sweep[r];
      const Vector v = soft_sort(x, at);
      rows.push_back({{"eps", sweep[r]}, {"sorted_values", to_list(v)}});
      table(static_cast<Eigen::Index>(r), 0) = sweep[r];
      table.row(static_cast<Eigen::Index>(r)).tail(v.size()) = v.transpose();
    }
    s["sweep"] = rows;
    if (!cfg.sweep_out.empty()) write_atomic(cfg.sweep_out, format_csv(table));
  }
  emit_summary(s, cfg.output);
  return result;
}

// ---------------------------------------------------------------------------

CommandResult run_gmm(const GmmConfig& cfg) {
  require_positive(cfg.eps_rel, "--eps-rel");
  if (cfg.gmm_files.size() != 2) throw InputError("gmm needs two mixture files");
  const GaussianMixture m1 = read_gmm(cfg.gmm_files[0]);
  const GaussianMixture m2 = read_gmm(cfg.gmm_files[1]);
  if (m1.dimension() != m2.dimension()) {
    throw InputError("mixtures have different dimensions");
  }
  GmmDistanceOptions opts;
  if (cfg.eps_rel) opts.eps_rel = *cfg.eps_rel;
  const GmmDistance d = gmm_distance(m1, m2, opts);

  CommandResult result;
  json& s = result.summary;
  s["command"] = "gmm";
  s["value"] = d.value;
  s["coupling"] = to_json(d.coupling);
  write_coupling(d.coupling, cfg.output.coupling_out);
  emit_summary(s, cfg.output);
  return result;
}

}  // namespace otkit::cli
