"""Outer solvers: the quasi-Newton loop and the Newton baseline.

Both solvers share one iteration skeleton.  At the iterate x with mapping
value F(x):

  S1  stop once alpha * ||x - P_C(x - F(x)/alpha)|| <= tol; otherwise set
      the regularization mu = mu_scale * ||x - P_C(x - F(x)/alpha)|| and
      solve the affine subproblem with operator
      F(x) + (B + mu I)(z - x) inexactly (see linvi); stop if the subproblem
      returns z numerically equal to x.
  S2  (quasi-Newton solver only) accept the unit step x+ = z whenever the
      gap value drops by the factor gamma.
  S3  otherwise build y = z - e and v = F(y) - phi(z) + e; if the deviation
      vector -v - mu (y - x) is small relative to eta * mu * ||y - x||, go
      to S4 directly, else run the back-tracking search along z - x and take
      y, v = F(y) from it.
  S4  project x onto the separating hyperplane through y with normal v and
      then back onto the set.
  S5  (quasi-Newton solver only) cautious BFGS update of B with
      s = x+ - x and the corresponding mapping difference.

The Newton baseline replaces B by the analytic (or finite-difference)
Jacobian, never takes S2, and skips S5.

A note on the line-search threshold: the standalone ``line_search`` operation
uses the inequality

    <F(x + beta^m (z - x)), x - z>  >=  lambda_ * (1 - rho) * ||z - x||^2.

The subproblem guarantees <F(x), x - z> >= (1 - rho) * mu * ||z - x||^2 and
nothing stronger, so the solver loop passes lambda_ * mu for the coefficient;
with a plain lambda_ the search provably runs out of exponents whenever
mu < lambda_, which happens on every problem close to a solution.

One solve owns its mutable state exclusively; separate solves may run
concurrently on distinct problems or initial points.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import (
    Branch,
    IterationRecord,
    SolveReport,
    SolverConfig,
    Status,
    VIProblem,
    make_branch_counts,
    validate_config,
)
from .errors import (
    InnerMaxIterExceeded,
    JacobianUnavailable,
    LineSearchExhausted,
    SingularSystem,
    ZeroNormal,
)
from .linvi import LinViSpec, phi, solve_linvi
from .merit import MeritEval, merit_eval
from .problems import fd_jacobian
from .qn import cautious_bfgs_update, initial_state
from .sets import Polyhedron


@dataclass(frozen=True)
class HyperplaneData:
    """Separating-hyperplane ingredients built in S3."""

    y: np.ndarray
    v: np.ndarray
    eps_vec: np.ndarray


@dataclass(frozen=True)
class MuSchedule:
    """Regularization rule mu = scale * ||x - P_C(x - F(x)/alpha)||.

    The distance equals residual / alpha of a shared merit evaluation, so the
    ratio of mu to the natural residual is the constant scale / alpha.
    """

    scale: float
    alpha: float

    def value(self, me: MeritEval) -> float:
        return self.scale * me.residual / self.alpha

    @classmethod
    def from_config(cls, cfg: SolverConfig) -> "MuSchedule":
        return cls(scale=cfg.mu_scale, alpha=cfg.alpha)


def line_search(problem, x_k, z_k, rho_hat, lambda_, beta, max_linesearch):
    """Smallest m with <F(x + beta^m (z-x)), x-z> >= lambda_(1-rho)||z-x||^2.

    Returns (beta**m, trial point, F at the trial point); raises
    LineSearchExhausted when no m up to the cap qualifies.
    """
    x_k = np.asarray(x_k, dtype=float)
    z_k = np.asarray(z_k, dtype=float)
    d = z_k - x_k
    threshold = lambda_ * (1.0 - rho_hat) * float(d @ d)
    step = 1.0
    for _ in range(max_linesearch + 1):
        y = x_k + step * d
        fy = problem.f(y)
        if float(fy @ -d) >= threshold:
            return step, y, fy
        step *= beta
    raise LineSearchExhausted(
        f"no exponent up to {max_linesearch} satisfied the search inequality"
    )


def hyperplane_step(x_k, y_k, v_k, set_, projector=None):
    """Project x onto {x : <v, x - y> = 0}, then back onto the set."""
    x_k = np.asarray(x_k, dtype=float)
    v_k = np.asarray(v_k, dtype=float)
    nv2 = float(v_k @ v_k)
    if nv2 <= 1e-28:
        raise ZeroNormal("hyperplane normal is numerically zero")
    x_hat = x_k - (float(v_k @ (x_k - np.asarray(y_k, dtype=float))) / nv2) * v_k
    proj = projector.project if projector is not None else set_.project
    return proj(x_hat)


def irqn_solve(problem, x0, cfg=None, on_iteration=None) -> SolveReport:
    """Quasi-Newton solve with merit unit steps and hyperplane globalization."""
    return _solve(problem, x0, cfg or SolverConfig(), "irqn", True, on_iteration)


def inm_solve(problem, x0, cfg=None, use_fd=True, on_iteration=None) -> SolveReport:
    """Newton baseline: true Jacobian, projection correction every iteration."""
    return _solve(problem, x0, cfg or SolverConfig(), "inm", use_fd, on_iteration)


def _derivative(problem: VIProblem, x, use_fd: bool) -> np.ndarray:
    if problem.jacobian is not None:
        return problem.jac(x)
    if not use_fd:
        raise JacobianUnavailable(
            f"{problem.label or 'problem'} has no analytic jacobian"
        )
    return fd_jacobian(problem, x)


def _solve(problem, x0, cfg, mode, use_fd, on_iteration) -> SolveReport:
    issues = validate_config(cfg)
    if issues:
        raise ValueError("invalid config: " + "; ".join(issues))
    t0 = time.perf_counter()

    set_ = problem.set
    projector = set_.projector() if isinstance(set_, Polyhedron) else None
    proj = projector.project if projector is not None else set_.project

    x = np.asarray(x0, dtype=float)
    if not set_.contains(x, tol=0.0):
        x = proj(x)
    fx = problem.f(x)
    schedule = MuSchedule.from_config(cfg)
    qn_state = initial_state(problem.dim) if mode == "irqn" else None
    eye = np.eye(problem.dim)

    history: list[IterationRecord] = []
    status = None

    def terminal(k, me, inner):
        history.append(IterationRecord(
            k=k, res=me.residual, merit=me.gap,
            branch=Branch.TERMINAL, step_size=0.0, inner_iters=inner,
        ))

    for k in range(cfg.max_iter + 1):
        me = merit_eval(problem, x, cfg.alpha, fx=fx, projector=projector)
        if me.residual <= cfg.tol:
            terminal(k, me, 0)
            status = Status.CONVERGED
            break
        if k == cfg.max_iter:
            terminal(k, me, 0)
            status = Status.MAX_ITERATIONS
            break

        mu_k = schedule.value(me)
        rho_hat = cfg.rho_hat(k)
        B = qn_state.B if mode == "irqn" else _derivative(problem, x, use_fd)
        spec = LinViSpec(M=B + mu_k * eye, q_base=fx, anchor=x, set=set_)
        try:
            sub = solve_linvi(
                spec, x, rho_hat, mu_k,
                inner_tol_abs=cfg.inner_tol_abs,
                inner_max_iter=cfg.inner_max_iter,
                projector=projector,
            )
        except (InnerMaxIterExceeded, SingularSystem):
            terminal(k, me, cfg.inner_max_iter)
            status = Status.SUBPROBLEM_FAILURE
            break
        z, e = sub.z, sub.e

        if np.linalg.norm(z - x) <= 1e-14 * (1.0 + np.linalg.norm(x)):
            # The subproblem's fixed point coincides with the iterate.  In
            # exact arithmetic that certifies a solution; if the outer
            # residual disagrees the state is numerically inconsistent.
            terminal(k, me, sub.inner_iters)
            status = (
                Status.CONVERGED if me.residual <= cfg.tol
                else Status.SUBPROBLEM_FAILURE
            )
            break

        branch = None
        step = 1.0
        info = {
            "x_prev": x, "z": z, "e": e, "mu": mu_k, "rho_hat": rho_hat,
            "gap_x": me.gap, "hyperplane": None, "gap_z": None,
        }

        if mode == "irqn" and me.gap > 0.0:
            fz = problem.f(z)
            me_z = merit_eval(problem, z, cfg.alpha, fx=fz, projector=projector)
            info["gap_z"] = me_z.gap
            if me_z.gap <= cfg.gamma * me.gap:
                branch = Branch.UNIT_STEP
                x_next, fx_next = z, fz

        if branch is None:
            y = z - e
            fy = problem.f(y)
            v = fy - phi(spec, z) + e
            eps_vec = -v - mu_k * (y - x)
            if np.linalg.norm(eps_vec) <= cfg.eta * mu_k * np.linalg.norm(y - x):
                branch = Branch.HYPERPLANE
            else:
                try:
                    step, y, v = line_search(
                        problem, x, z, rho_hat,
                        cfg.lambda_ * mu_k, cfg.beta, cfg.max_linesearch,
                    )
                except LineSearchExhausted:
                    terminal(k, me, sub.inner_iters)
                    status = Status.LINESEARCH_EXHAUSTED
                    break
                branch = Branch.LINESEARCH_HYPERPLANE
            info["hyperplane"] = HyperplaneData(y=y, v=v, eps_vec=eps_vec)
            try:
                x_next = hyperplane_step(x, y, v, set_, projector)
            except ZeroNormal:
                terminal(k, me, sub.inner_iters)
                status = Status.SUBPROBLEM_FAILURE
                break
            fx_next = problem.f(x_next)

        if mode == "irqn":
            s = x_next - x
            if float(s @ s) > 0.0:
                qn_state = cautious_bfgs_update(
                    qn_state, s, fx_next - fx, cfg.h, mu_k, cfg.r_exp
                )

        rec = IterationRecord(
            k=k, res=me.residual, merit=me.gap,
            branch=branch, step_size=step, inner_iters=sub.inner_iters,
        )
        history.append(rec)
        if on_iteration is not None:
            on_iteration(k, x_next, rec, info)
        x, fx = x_next, fx_next

    # Every exit path appends a terminal record carrying the residual at the
    # final iterate.
    return SolveReport(
        status=status,
        iterations=len(history),
        final_x=x,
        final_res=history[-1].res,
        history=tuple(history),
        wall_time=time.perf_counter() - t0,
        branch_counts=make_branch_counts(history),
    )
