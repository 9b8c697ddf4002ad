"""Projection-based quasi-Newton solvers for monotone variational inequalities."""

from .core import (
    Branch,
    IterationRecord,
    SolveReport,
    SolverConfig,
    Status,
    VIProblem,
    load_config,
    save_config,
    validate_config,
)
from .linvi import LinViResult, LinViSpec, check_inexact, phi, solve_linvi
from .merit import MeritEval, f_alpha, h_alpha, merit_eval, natural_residual
from .problems import (
    ProblemSpec,
    build_problem,
    fd_jacobian,
    get_problem,
    list_problems,
    make_spec,
    random_matrix_suite,
)
from .qn import QnState, cautious_bfgs_update, initial_state
from .sets import (
    Box,
    FeasibleSet,
    Polyhedron,
    PolyhedronProjector,
    QpCertificate,
    WholeSpace,
    box,
    contains,
    nonneg_orthant,
    project,
    project_polyhedron,
    uniform_box,
)
from .solvers import (
    HyperplaneData,
    MuSchedule,
    hyperplane_step,
    inm_solve,
    irqn_solve,
    line_search,
)

__all__ = [
    "Branch",
    "Box",
    "FeasibleSet",
    "HyperplaneData",
    "IterationRecord",
    "LinViResult",
    "LinViSpec",
    "MeritEval",
    "MuSchedule",
    "Polyhedron",
    "PolyhedronProjector",
    "ProblemSpec",
    "QnState",
    "QpCertificate",
    "SolveReport",
    "SolverConfig",
    "Status",
    "VIProblem",
    "WholeSpace",
    "box",
    "build_problem",
    "cautious_bfgs_update",
    "check_inexact",
    "contains",
    "f_alpha",
    "fd_jacobian",
    "get_problem",
    "h_alpha",
    "hyperplane_step",
    "initial_state",
    "inm_solve",
    "irqn_solve",
    "line_search",
    "list_problems",
    "load_config",
    "make_spec",
    "merit_eval",
    "natural_residual",
    "nonneg_orthant",
    "phi",
    "project",
    "project_polyhedron",
    "random_matrix_suite",
    "save_config",
    "solve_linvi",
    "uniform_box",
    "validate_config",
]

__version__ = "0.1.0"
