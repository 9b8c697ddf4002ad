"""Feasible sets and Euclidean projection operators.

Three set shapes are supported: the whole space, boxes (with infinite bounds
allowed, so the nonnegative orthant is a box), and polyhedra
{x : A x <= b, l <= x <= u}.  Polyhedral projections run a dense primal
active-set method for min 0.5*||y - x||^2 over the set, with Bland-style
anti-cycling and optional warm starts, and return a KKT certificate.

Projection is a pure function of (set, x).  The warm-start cache lives in
PolyhedronProjector instances, which are owned per solver instance and never
shared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import CycleLimitExceeded, DimensionMismatch, InfeasibleSet

# Largest row/column count accepted by the dense polyhedral path.
DENSE_LIMIT = 512

# A returned projection must satisfy every constraint within this bound.
FEAS_TOL = 1e-10


class FeasibleSet:
    """Base class; concrete sets implement project/contains."""

    dim: int

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def _check_dim(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected vector of length {self.dim}, got shape {x.shape}"
            )
        return x


class WholeSpace(FeasibleSet):
    def __init__(self, dim: int):
        self.dim = int(dim)

    def project(self, x):
        return self._check_dim(x).copy()

    def contains(self, x, tol: float = 0.0) -> bool:
        self._check_dim(x)
        return True

    def __repr__(self):
        return f"WholeSpace(dim={self.dim})"


class Box(FeasibleSet):
    """Componentwise bounds l <= x <= u; -inf / +inf entries are allowed."""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise DimensionMismatch("box bounds must be 1-d and equal length")
        if np.any(self.lower > self.upper):
            raise ValueError("box requires lower <= upper componentwise")
        self.dim = self.lower.shape[0]

    def project(self, x):
        return np.clip(self._check_dim(x), self.lower, self.upper)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = self._check_dim(x)
        return bool(
            np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol)
        )

    def __repr__(self):
        return f"Box(dim={self.dim})"


def box(lower, upper) -> Box:
    return Box(lower, upper)


def nonneg_orthant(dim: int) -> Box:
    return Box(np.zeros(dim), np.full(dim, np.inf))


def uniform_box(lo: float, hi: float, dim: int) -> Box:
    return Box(np.full(dim, lo), np.full(dim, hi))


@dataclass(frozen=True)
class QpCertificate:
    """KKT evidence for a polyhedral projection.

    ``multipliers`` covers the normalized row system (A rows first, then
    finite lower bounds as -e_i rows, then finite upper bounds as +e_i rows),
    so its length equals the total number of normalized rows.
    """

    multipliers: np.ndarray
    active_set: tuple
    kkt_residual: float
    complementarity_residual: float


class Polyhedron(FeasibleSet):
    """{x : A x <= b, lower <= x <= upper}; bounds optional.

    Construction runs a phase-one feasibility check (and caches the
    projection of the origin as a cold-start anchor); an empty set raises
    InfeasibleSet.
    """

    def __init__(self, A, b, lower=None, upper=None):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.b = np.asarray(b, dtype=float)
        m, n = self.A.shape
        if self.b.shape != (m,):
            raise DimensionMismatch("b must have one entry per row of A")
        if m > DENSE_LIMIT or n > DENSE_LIMIT:
            raise ValueError(f"dense polyhedral path is limited to {DENSE_LIMIT}")
        self.dim = n
        self.lower = (
            np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float)
        )
        self.upper = (
            np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float)
        )
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise DimensionMismatch("bounds must match the column count of A")
        self.rows, self.rhs = _normalize_rows(
            self.A, self.b, self.lower, self.upper
        )
        self._row_norms = np.linalg.norm(self.rows, axis=1)
        feas = self._phase_one()
        self.anchor, _, self._anchor_ws = _active_set_project(
            self.rows, self.rhs, np.zeros(n), feas, []
        )

    def _phase_one(self) -> np.ndarray:
        bounds = [
            (None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi)
            for lo, hi in zip(self.lower, self.upper)
        ]
        res = linprog(
            c=np.zeros(self.dim),
            A_ub=self.A,
            b_ub=self.b,
            bounds=bounds,
            method="highs",
        )
        if not res.success:
            raise InfeasibleSet("phase-one found no feasible point")
        return np.asarray(res.x, dtype=float)

    def project(self, x):
        y, _ = self.project_certified(x)
        return y

    def project_certified(self, x):
        x = self._check_dim(x)
        y, cert, _ = _project_rows(
            self.rows, self.rhs, x, self.anchor, self._anchor_ws, self.anchor
        )
        return y, cert

    def contains(self, x, tol: float = 0.0) -> bool:
        x = self._check_dim(x)
        return bool(np.all(self.rows @ x - self.rhs <= tol))

    def projector(self) -> "PolyhedronProjector":
        """Fresh warm-start capable projector (one per solver instance)."""
        return PolyhedronProjector(self)

    def __repr__(self):
        return f"Polyhedron(dim={self.dim}, rows={self.rows.shape[0]})"


class PolyhedronProjector:
    """Stateful projector that warm-starts from the previous projection."""

    def __init__(self, poly: Polyhedron):
        self.poly = poly
        self._y = poly.anchor
        self._ws: list = list(poly._anchor_ws)

    def project(self, x) -> np.ndarray:
        y, _ = self.project_certified(x)
        return y

    def project_certified(self, x):
        x = self.poly._check_dim(x)
        y, cert, ws = _project_rows(
            self.poly.rows, self.poly.rhs, x, self._y, self._ws, self.poly.anchor
        )
        self._y, self._ws = y, ws
        return y, cert


def _normalize_rows(A, b, lower, upper):
    """Fold bounds into the row system: A rows, then -e_i (lower), then e_i."""
    n = A.shape[1]
    rows = [A]
    rhs = [b]
    eye = np.eye(n)
    lo_idx = np.flatnonzero(np.isfinite(lower))
    hi_idx = np.flatnonzero(np.isfinite(upper))
    if lo_idx.size:
        rows.append(-eye[lo_idx])
        rhs.append(-lower[lo_idx])
    if hi_idx.size:
        rows.append(eye[hi_idx])
        rhs.append(upper[hi_idx])
    return np.vstack(rows), np.concatenate(rhs)


def _active_set_project(G, h, x, y0, ws0, max_pivots: Optional[int] = None):
    """Project x onto {y : G y <= h} starting from the feasible point y0.

    ws0 must hold only rows active at y0.  Returns (y, multipliers over G's
    rows, final working set).  Ties in entering/leaving rows are broken by
    smallest row index (Bland) and a pivot cap guards against cycling.
    """
    m, n = G.shape
    if max_pivots is None:
        max_pivots = 100 + 20 * (m + n)
    y = y0.astype(float).copy()
    ws = sorted(int(i) for i in ws0)
    lam_ws = np.zeros(0)
    xnorm = 1.0 + np.linalg.norm(x)
    for _ in range(max_pivots):
        if ws:
            GW = G[ws]
            gram = GW @ GW.T
            lam_ws = np.linalg.lstsq(gram, GW @ x - h[ws], rcond=None)[0]
            v = x - GW.T @ lam_ws
        else:
            lam_ws = np.zeros(0)
            v = x.copy()
        p = v - y
        if np.linalg.norm(p) <= 1e-12 * xnorm:
            neg = np.flatnonzero(lam_ws < -1e-12)
            if neg.size == 0:
                lam = np.zeros(m)
                if ws:
                    lam[ws] = np.maximum(lam_ws, 0.0)
                return v, lam, ws
            drop = min(ws[j] for j in neg)
            ws.remove(drop)
            continue
        # Step toward v, stopping at the first blocking row outside ws.
        Gp = G @ p
        slack = np.maximum(h - G @ y, 0.0)
        candidates = Gp > 1e-14 * (1.0 + np.linalg.norm(p))
        candidates[ws] = False
        t = 1.0
        blocker = -1
        if np.any(candidates):
            idx = np.flatnonzero(candidates)
            ratios = slack[idx] / Gp[idx]
            tmin = ratios.min()
            if tmin < 1.0:
                t = max(tmin, 0.0)
                blocker = int(idx[ratios <= tmin + 1e-15].min())
        y = y + t * p
        if blocker >= 0:
            ws = sorted(ws + [blocker])
        else:
            y = v
    raise CycleLimitExceeded(f"no optimum after {max_pivots} pivots")


def _project_rows(G, h, x, y0, ws0, anchor):
    """Run the active-set projection and build its certificate."""
    y, lam, ws = _active_set_project(G, h, x, y0, ws0)
    viol = G @ y - h
    if viol.size and viol.max() > FEAS_TOL:
        # Warm start led somewhere inconsistent; retry cold before giving up.
        y, lam, ws = _active_set_project(G, h, x, anchor, [])
        viol = G @ y - h
        if viol.size and viol.max() > FEAS_TOL:
            raise CycleLimitExceeded("projection violates feasibility bound")
    stationarity = np.linalg.norm(y - x + G.T @ lam)
    comp = float(np.max(np.abs(lam * viol))) if viol.size else 0.0
    cert = QpCertificate(
        multipliers=lam,
        active_set=tuple(ws),
        kkt_residual=float(stationarity),
        complementarity_residual=comp,
    )
    return y, cert, ws


def project_polyhedron(A, b, lower, upper, x):
    """Project x onto {y : A y <= b, lower <= y <= upper}.

    Returns (point, certificate).  Builds a throwaway Polyhedron, so repeated
    calls should go through Polyhedron/PolyhedronProjector instead.
    """
    poly = Polyhedron(A, b, lower, upper)
    return poly.project_certified(x)


def project(set_: FeasibleSet, x) -> np.ndarray:
    """Euclidean projection of x onto the set."""
    return set_.project(x)


def contains(set_: FeasibleSet, x, tol: float = 0.0) -> bool:
    """True iff every constraint is violated by at most tol."""
    return set_.contains(x, tol)
