"""Cautious BFGS approximation of the mapping's Jacobian.

The update is applied only when the scaled curvature y's / ||s||^2 clears the
threshold h * mu^r; otherwise the matrix is kept.  The guarded update keeps
the approximation symmetric positive semidefinite, which the subproblem
relies on.  State is owned by a single solve; updates are sequential.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCurvatureWarning, DimensionMismatch


@dataclass(frozen=True)
class QnState:
    B: np.ndarray
    update_count: int = 0
    skip_count: int = 0


def initial_state(n: int) -> QnState:
    """Identity start."""
    return QnState(B=np.eye(n))


def cautious_bfgs_update(
    state: QnState, s, y, h: float, mu_k: float, r_exp: float
) -> QnState:
    """One cautious BFGS step with difference vectors s and y.

    Returns a new state; a skipped update shares the previous matrix
    bit-identically.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    B = state.B
    if s.shape != y.shape or s.shape != (B.shape[0],):
        raise DimensionMismatch("s, y, and B dimensions disagree")
    ss = float(s @ s)
    if ss <= 0.0:
        raise ValueError("update requires a nonzero step s")
    ys = float(y @ s)
    if ys / ss < h * mu_k**r_exp:
        return QnState(B=B, update_count=state.update_count,
                       skip_count=state.skip_count + 1)
    Bs = B @ s
    sBs = float(s @ Bs)
    if sBs <= 1e-14 * ss:
        warnings.warn(
            "curvature test passed but s'Bs is numerically zero; keeping B",
            DegenerateCurvatureWarning,
        )
        return QnState(B=B, update_count=state.update_count,
                       skip_count=state.skip_count + 1)
    Bnew = B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / ys
    Bnew = 0.5 * (Bnew + Bnew.T)  # kill roundoff drift from the outer products
    return QnState(B=Bnew, update_count=state.update_count + 1,
                   skip_count=state.skip_count)
