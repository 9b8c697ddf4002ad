"""Regularized gap function, fixed-point map, and the natural residual.

For a weight alpha > 0 the fixed-point map is H(x) = P_C(x - F(x)/alpha).
The gap value at x is

    gap(x) = -<F(x), H(x) - x> - (alpha/2) * ||H(x) - x||^2,

which equals max_{y in C} { -<F(x), y - x> - (alpha/2)||y - x||^2 } by the
projection characterization; it is nonnegative on C and vanishes exactly at
solutions.  The natural residual is alpha * ||x - H(x)|| and is the stopping
quantity.  One projection serves both values.

All functions here are pure and safe for concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import VIProblem


@dataclass(frozen=True)
class MeritEval:
    """Shared per-point evaluation: fixed-point image, gap, residual."""

    h_point: np.ndarray
    gap: float
    residual: float


def merit_eval(
    problem: VIProblem,
    x: np.ndarray,
    alpha: float,
    fx: np.ndarray | None = None,
    projector=None,
) -> MeritEval:
    """Evaluate H, the gap, and the residual at x with a single projection.

    ``fx`` may pass a precomputed F(x); ``projector`` may supply a
    warm-started polyhedral projector.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x = np.asarray(x, dtype=float)
    if fx is None:
        fx = problem.f(x)
    target = x - fx / alpha
    h = projector.project(target) if projector is not None else problem.set.project(target)
    d = h - x
    gap = float(-fx @ d - 0.5 * alpha * (d @ d))
    residual = float(alpha * np.linalg.norm(d))
    return MeritEval(h_point=h, gap=gap, residual=residual)


def h_alpha(problem: VIProblem, x, alpha: float) -> np.ndarray:
    """Fixed-point map P_C(x - F(x)/alpha); solutions are its fixed points."""
    return merit_eval(problem, x, alpha).h_point


def f_alpha(problem: VIProblem, x, alpha: float) -> float:
    """Gap value at x (nonnegative on the feasible set)."""
    return merit_eval(problem, x, alpha).gap


def natural_residual(problem: VIProblem, x, alpha: float) -> float:
    """alpha * ||x - H(x)||; zero exactly at solutions."""
    return merit_eval(problem, x, alpha).residual
