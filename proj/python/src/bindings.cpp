#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "otkit/otkit.hpp"

namespace py = pybind11;
using namespace otkit;

namespace {

using GeomHolder = std::shared_ptr<Geometry>;

// Dicts keep the Python side free of option classes.
py::dict to_dict(const RegOtCost& c) {
  py::dict d;
  d["transport_cost"] = c.transport_cost;
  d["dual_objective"] = c.dual_objective;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "otkit core bindings";

  static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
  (void)solver_error;

  py::enum_<CostFn>(m, "CostFn")
      .value("SqEuclidean", CostFn::kSqEuclidean)
      .value("Euclidean", CostFn::kEuclidean)
      .value("Cosine", CostFn::kCosine);

  py::class_<Geometry, GeomHolder>(m, "Geometry")
      .def_property_readonly("shape", [](const Geometry& g) { return py::make_tuple(g.rows(), g.cols()); })
      .def("cost_matrix", [](const Geometry& g) { return g.cost_matrix(); })
      .def("mean_cost", &Geometry::mean_cost)
      .def("epsilon_default", &Geometry::epsilon_default)
      .def("apply_kernel",
           [](const Geometry& g, const Vector& v, double eps, bool transpose) {
             return g.apply_kernel(v, eps, transpose ? Axis::kCols : Axis::kRows);
           },
           py::arg("v"), py::arg("eps"), py::arg("transpose") = false)
      .def("apply_lse_kernel",
           [](const Geometry& g, const Vector& f, const Vector& h, double eps, bool transpose) {
             return g.apply_lse_kernel(f, h, eps, transpose ? Axis::kCols : Axis::kRows);
           },
           py::arg("f"), py::arg("g"), py::arg("eps"), py::arg("transpose") = false);

  py::class_<DenseGeometry, Geometry, std::shared_ptr<DenseGeometry>>(m, "DenseGeometry")
      .def(py::init<Matrix>(), py::arg("cost"));

  py::class_<PointCloudGeometry, Geometry, std::shared_ptr<PointCloudGeometry>>(
      m, "PointCloudGeometry")
      .def(py::init<Matrix, Matrix, CostFn, Eigen::Index>(), py::arg("x"), py::arg("y"),
           py::arg("cost_fn") = CostFn::kSqEuclidean,
           py::arg("block_rows") = PointCloudGeometry::kDefaultBlockRows);

  py::class_<GridGeometry, Geometry, std::shared_ptr<GridGeometry>>(m, "GridGeometry")
      .def(py::init([](const std::vector<Vector>& axes) {
             return std::make_shared<GridGeometry>(GridGeometry::from_axes(axes));
           }),
           py::arg("axes"))
      .def_property_readonly("grid_shape", &GridGeometry::shape);

  py::class_<LinearProblem>(m, "LinearProblem")
      .def(py::init([](GeomHolder geom, std::optional<Vector> a, std::optional<Vector> b) {
             return LinearProblem(geom, a ? *a : uniform_weights(geom->rows()),
                                  b ? *b : uniform_weights(geom->cols()));
           }),
           py::arg("geom"), py::arg("a") = py::none(), py::arg("b") = py::none())
      .def_readonly("a", &LinearProblem::a)
      .def_readonly("b", &LinearProblem::b);

  py::class_<SinkhornOutput>(m, "SinkhornOutput")
      .def_readonly("f", &SinkhornOutput::f)
      .def_readonly("g", &SinkhornOutput::g)
      .def_readonly("errors", &SinkhornOutput::errors)
      .def_readonly("dual_objectives", &SinkhornOutput::dual_objectives)
      .def_readonly("iterations", &SinkhornOutput::iterations)
      .def_readonly("converged", &SinkhornOutput::converged)
      .def_readonly("eps", &SinkhornOutput::eps);

  m.def("solve_sinkhorn",
        [](const LinearProblem& prob, std::optional<double> eps, double threshold, int max_iters,
           int inner_iters) {
          const SinkhornOptions opts{threshold, max_iters, inner_iters};
          return solve_sinkhorn(prob, eps ? *eps : prob.geom->epsilon_default(), opts);
        },
        py::arg("prob"), py::arg("eps") = py::none(), py::arg("threshold") = 1e-3,
        py::arg("max_iters") = 2000, py::arg("inner_iters") = 10);
  m.def("transport_matrix", &transport_matrix, py::arg("out"), py::arg("prob"));
  m.def("reg_ot_cost",
        [](const SinkhornOutput& out, const LinearProblem& prob) {
          return to_dict(reg_ot_cost(out, prob));
        },
        py::arg("out"), py::arg("prob"));
  m.def("grad_weights", &grad_weights, py::arg("out"), py::arg("prob"));
  m.def("grad_points", &grad_points, py::arg("out"), py::arg("prob"));

  py::class_<LowRankOutput>(m, "LowRankOutput")
      .def_property_readonly("q", [](const LowRankOutput& o) { return o.factors.q; })
      .def_property_readonly("r", [](const LowRankOutput& o) { return o.factors.r; })
      .def_property_readonly("g", [](const LowRankOutput& o) { return o.factors.g; })
      .def_readonly("costs", &LowRankOutput::costs)
      .def_readonly("iterations", &LowRankOutput::iterations)
      .def_readonly("converged", &LowRankOutput::converged)
      .def_readonly("gamma", &LowRankOutput::gamma);

  m.def("solve_lr_sinkhorn",
        [](const LinearProblem& prob, Eigen::Index rank, std::optional<double> gamma,
           double threshold, int max_iters, std::uint64_t seed) {
          LowRankOptions opts;
          opts.gamma = gamma;
          opts.threshold = threshold;
          opts.max_iters = max_iters;
          opts.seed = seed;
          return solve_lr_sinkhorn(prob, rank, opts);
        },
        py::arg("prob"), py::arg("rank"), py::arg("gamma") = py::none(),
        py::arg("threshold") = 1e-6, py::arg("max_iters") = 2000, py::arg("seed") = 0);
  m.def("lr_coupling", [](const LowRankOutput& o) { return lr_coupling(o.factors); });
  m.def("lr_transport_cost",
        [](const Geometry& geom, const LowRankOutput& o) {
          return lr_transport_cost(geom, o.factors);
        },
        py::arg("geom"), py::arg("out"));

  py::class_<QuadraticProblem>(m, "QuadraticProblem")
      .def(py::init([](GeomHolder gx, GeomHolder gy, std::optional<Vector> a,
                       std::optional<Vector> b) {
             return QuadraticProblem(gx, gy, a ? *a : uniform_weights(gx->rows()),
                                     b ? *b : uniform_weights(gy->rows()));
           }),
           py::arg("geom_x"), py::arg("geom_y"), py::arg("a") = py::none(),
           py::arg("b") = py::none());

  m.def("gw_objective",
        [](const QuadraticProblem& qp, const Matrix& p, bool literal) {
          return gw_objective(qp, p, literal ? GwEvaluation::kLiteral : GwEvaluation::kExpansion);
        },
        py::arg("qp"), py::arg("coupling"), py::arg("literal") = false);
  m.def("gw_linearized_cost", &gw_linearized_cost, py::arg("qp"), py::arg("coupling"));
  m.def("solve_gw",
        [](const QuadraticProblem& qp, std::optional<double> eps, double eps_rel, int outer_iters,
           double outer_threshold) {
          GwOptions opts;
          opts.eps = eps;
          opts.eps_rel = eps_rel;
          opts.outer_iters = outer_iters;
          opts.outer_threshold = outer_threshold;
          const GwOutput out = solve_gw(qp, opts);
          py::dict d;
          d["coupling"] = out.coupling;
          d["gw_cost"] = out.gw_cost;
          d["cost_trace"] = out.cost_trace;
          d["outer_iterations"] = out.outer_iterations;
          d["converged"] = out.converged;
          return d;
        },
        py::arg("qp"), py::arg("eps") = py::none(), py::arg("eps_rel") = 1e-2,
        py::arg("outer_iters") = 20, py::arg("outer_threshold") = 1e-5);

  py::class_<BarycenterProblem>(m, "BarycenterProblem")
      .def(py::init([](GeomHolder geom, std::vector<Vector> hists, std::optional<Vector> w) {
             if (w) return BarycenterProblem(geom, std::move(hists), *w);
             return BarycenterProblem(geom, std::move(hists));
           }),
           py::arg("geom"), py::arg("histograms"), py::arg("weights") = py::none());
  m.def("solve_barycenter",
        [](const BarycenterProblem& bp, double eps, double threshold, int max_iters) {
          const BarycenterOutput out = solve_barycenter(bp, eps, {threshold, max_iters});
          py::dict d;
          d["barycenter"] = out.barycenter;
          d["converged"] = out.converged;
          d["iterations"] = out.iterations;
          return d;
        },
        py::arg("bp"), py::arg("eps"), py::arg("threshold") = 1e-4, py::arg("max_iters") = 1000);

  auto spec = [](double eps, std::optional<Eigen::Index> num_targets) {
    SoftSortSpec s;
    s.eps = eps;
    s.num_targets = num_targets;
    return s;
  };
  m.def("soft_sort",
        [spec](const Vector& x, double eps, std::optional<Eigen::Index> num_targets) {
          return soft_sort(x, spec(eps, num_targets));
        },
        py::arg("x"), py::arg("eps") = 1e-2, py::arg("num_targets") = py::none());
  m.def("soft_rank",
        [spec](const Vector& x, double eps) { return soft_rank(x, spec(eps, std::nullopt)); },
        py::arg("x"), py::arg("eps") = 1e-2);

  py::class_<Gaussian>(m, "Gaussian")
      .def(py::init<Vector, Matrix>(), py::arg("mean"), py::arg("cov"))
      .def_readonly("mean", &Gaussian::mean)
      .def_readonly("cov", &Gaussian::cov);
  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def(py::init<Vector, std::vector<Gaussian>>(), py::arg("weights"), py::arg("components"));
  m.def("bures_w2", &bures_w2, py::arg("g1"), py::arg("g2"));
  m.def("gmm_distance",
        [](const GaussianMixture& a, const GaussianMixture& b, double eps_rel) {
          GmmDistanceOptions opts;
          opts.eps_rel = eps_rel;
          const GmmDistance d = gmm_distance(a, b, opts);
          py::dict out;
          out["value"] = d.value;
          out["coupling"] = d.coupling;
          return out;
        },
        py::arg("mm1"), py::arg("mm2"), py::arg("eps_rel") = 1e-3);

  m.def("exact_lp_uniform",
        [](const Matrix& c) {
          const auto r = reference::exact_lp_uniform(c);
          return py::make_tuple(r.value, r.permutation);
        },
        py::arg("cost"));
  m.def("exact_gw_2x2",
        [](const Matrix& cx, const Matrix& cy, const Vector& a, const Vector& b) {
          const auto r = reference::exact_gw_2x2(cx, cy, a, b);
          return py::make_tuple(r.value, r.coupling);
        },
        py::arg("cx"), py::arg("cy"), py::arg("a"), py::arg("b"));
}
