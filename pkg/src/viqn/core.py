"""Core domain types: problems, solver configuration, iteration records, reports.

Everything here is immutable after construction and safe to share read-only
across threads; a solve owns its mutable state exclusively.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, NonFiniteEvaluation


class Branch(str, Enum):
    """How an outer iteration produced its successor (or terminated)."""

    UNIT_STEP = "UnitStep"
    HYPERPLANE = "Hyperplane"
    LINESEARCH_HYPERPLANE = "LineSearchHyperplane"
    TERMINAL = "Terminal"


class Status(str, Enum):
    """Terminal state of a solve."""

    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    LINESEARCH_EXHAUSTED = "LineSearchExhausted"
    SUBPROBLEM_FAILURE = "SubproblemFailure"


@dataclass(frozen=True)
class VIProblem:
    """A variational inequality: find x* in the set with <F(x*), x - x*> >= 0.

    ``eval_f`` maps an n-vector to an n-vector.  ``jacobian`` is optional and
    analytic when present; solvers that need derivatives fall back to finite
    differences otherwise.  ``known_solutions`` may hold several vectors for
    problems with more than one documented solution; ``known_solution`` is the
    first of them (or None).
    """

    dim: int
    eval_f: Callable[[np.ndarray], np.ndarray]
    set: "FeasibleSet"  # noqa: F821 - imported lazily to avoid a cycle
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    known_solutions: tuple = ()
    label: str = ""

    @property
    def known_solution(self) -> Optional[np.ndarray]:
        return self.known_solutions[0] if self.known_solutions else None

    def f(self, x: np.ndarray) -> np.ndarray:
        """Evaluate F with shape checking."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of length {self.dim}, got shape {x.shape}"
            )
        out = np.asarray(self.eval_f(x), dtype=float)
        if out.shape != (self.dim,):
            raise DimensionMismatch(
                f"F returned shape {out.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(out)):
            raise NonFiniteEvaluation(f"F({x!r}) contains NaN or infinity")
        return out

    def jac(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the analytic Jacobian (raises if absent)."""
        if self.jacobian is None:
            raise DimensionMismatch("problem has no analytic jacobian")
        x = np.asarray(x, dtype=float)
        J = np.asarray(self.jacobian(x), dtype=float)
        if J.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"jacobian returned shape {J.shape}, expected "
                f"({self.dim}, {self.dim})"
            )
        return J


# Parameters that must lie strictly inside (0, 1).
_OPEN_UNIT = ("eta", "lambda_", "beta", "gamma")
# Parameters that must be strictly positive.
_POSITIVE = ("alpha", "h", "r_exp", "tol", "mu_scale", "inner_tol_abs", "rho_min")
# Integer parameters that must be at least 1.
_POSITIVE_INT = ("max_iter", "max_linesearch", "inner_max_iter")


@dataclass(frozen=True)
class SolverConfig:
    """All scalars of the outer algorithm plus schedules and caps.

    Defaults reproduce the reference experiment settings.  The inexactness
    level follows the schedule rho_k = rho0 * rho_factor**k, floored at
    rho_min: with rho_k = 0 the subproblem test would demand an exact solve,
    which is unreachable in floating point, so the effective level is
    rho_hat_k = max(rho_k, rho_min).
    """

    alpha: float = 0.01
    eta: float = 0.3
    lambda_: float = 0.5
    beta: float = 0.7
    gamma: float = 0.5
    h: float = 1e-5
    r_exp: float = 1.0
    tol: float = 1e-5
    mu_scale: float = 0.01
    rho0: float = 0.0
    rho_factor: float = 0.5
    rho_min: float = 1e-8
    max_iter: int = 2000
    max_linesearch: int = 60
    inner_tol_abs: float = 1e-10
    inner_max_iter: int = 10000

    def rho_k(self, k: int) -> float:
        return self.rho0 * self.rho_factor**k

    def rho_hat(self, k: int) -> float:
        return max(self.rho_k(k), self.rho_min)


def validate_config(cfg: SolverConfig) -> list[str]:
    """Return every constraint violation; an empty list means valid."""
    errors: list[str] = []
    for name in _OPEN_UNIT:
        v = getattr(cfg, name)
        if not (0.0 < v < 1.0):
            errors.append(f"{name.rstrip('_')} must lie in (0,1)")
    for name in _POSITIVE:
        v = getattr(cfg, name)
        if not v > 0.0:
            errors.append(f"{name} must be positive")
    if not (0.0 <= cfg.rho0 < 1.0):
        errors.append("rho0 must lie in [0,1)")
    if not (0.0 < cfg.rho_factor <= 1.0):
        errors.append("rho_factor must lie in (0,1]")
    if cfg.rho_min >= 1.0:
        errors.append("rho_min must be below 1")
    for name in _POSITIVE_INT:
        v = getattr(cfg, name)
        if not (isinstance(v, (int, np.integer)) and v >= 1):
            errors.append(f"{name} must be a positive integer")
    return errors


def save_config(cfg: SolverConfig, path) -> None:
    """Write a config as flat key=value lines (floats via repr, lossless)."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name}={v!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_config(path, base: Optional[SolverConfig] = None) -> SolverConfig:
    """Read a flat key=value config file; unknown keys are rejected.

    Missing keys keep their values from ``base`` (default config if None).
    """
    base = base if base is not None else SolverConfig()
    known = {f.name: f.type for f in fields(base)}
    overrides = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in known:
                raise ValueError(f"unknown config key: {key!r}")
            if key in _POSITIVE_INT:
                overrides[key] = int(val)
            else:
                overrides[key] = float(val)
    merged = {f.name: getattr(base, f.name) for f in fields(base)}
    merged.update(overrides)
    return SolverConfig(**merged)


@dataclass(frozen=True)
class IterationRecord:
    """Snapshot of one outer iteration, taken at its entry point."""

    k: int
    res: float
    merit: float
    branch: Branch
    step_size: float
    inner_iters: int


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve."""

    status: Status
    iterations: int
    final_x: np.ndarray
    final_res: float
    history: tuple[IterationRecord, ...]
    wall_time: float
    branch_counts: dict

    def count(self, branch: Branch) -> int:
        return self.branch_counts.get(branch, 0)


def make_branch_counts(history: Sequence[IterationRecord]) -> dict:
    counts = {b: 0 for b in Branch}
    for rec in history:
        counts[rec.branch] += 1
    return counts
