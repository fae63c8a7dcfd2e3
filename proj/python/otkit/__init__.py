"""Entropic and low-rank optimal transport solvers."""

from ._core import (
    BarycenterProblem,
    CostFn,
    DenseGeometry,
    Gaussian,
    GaussianMixture,
    Geometry,
    GridGeometry,
    LinearProblem,
    LowRankOutput,
    PointCloudGeometry,
    QuadraticProblem,
    SinkhornOutput,
    SolverError,
    bures_w2,
    exact_gw_2x2,
    exact_lp_uniform,
    gmm_distance,
    grad_points,
    grad_weights,
    gw_linearized_cost,
    gw_objective,
    lr_coupling,
    lr_transport_cost,
    reg_ot_cost,
    soft_rank,
    soft_sort,
    solve_barycenter,
    solve_gw,
    solve_lr_sinkhorn,
    solve_sinkhorn,
    transport_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
