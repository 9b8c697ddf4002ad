"""Inexact solver for the affine variational-inequality subproblem.

The subproblem operator is phi(z) = q + M (z - anchor) over the outer
feasible set, where M is the regularized derivative approximation and q the
outer mapping value at the anchor.  The residual of a candidate z is
e(z) = z - P_C(z - phi(z)); the solve stops once either

  * both inexactness tests hold at level rho_hat:
        ||e|| <= rho_hat * mu * ||z - anchor||
        <e, phi(z) + z - anchor> <= rho_hat * mu * ||z - anchor||^2
  * or ||e|| <= inner_tol_abs (absolute fallback),

whichever comes first.

Inner method: extragradient with an adaptive step (the step is halved until
<phi(z) - phi(zbar), z - zbar> <= ||z - zbar||^2 / tau holds), starting from
tau = 1/(1 + ||M||_inf).  Whole-space sets short-circuit to a dense linear
solve.  Box sets additionally fall back to a projected Gauss-Seidel sweep
when extragradient stalls or its contraction is too slow to finish within
the iteration budget; the sweep is safe there whenever M has a positive
diagonal and is abandoned if it diverges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InnerMaxIterExceeded, SingularSystem
from .sets import Box, FeasibleSet, WholeSpace

# Size cap for the eigenvalue check on the whole-space direct path.
_EIG_CHECK_LIMIT = 512

# Extragradient iterations granted before the Gauss-Seidel fallback may fire.
_STAGE_ONE_CAP = 200

# Literal stall rule: relative progress below this over a 50-iteration window.
_STALL_WINDOW = 50
_STALL_RTOL = 1e-14


@dataclass(frozen=True)
class LinViSpec:
    """Affine subproblem data: operator z -> q_base + M (z - anchor) on set.

    M + M^T is expected positive definite (regularization guarantees it when
    the derivative approximation is positive semidefinite).
    """

    M: np.ndarray
    q_base: np.ndarray
    anchor: np.ndarray
    set: FeasibleSet


@dataclass(frozen=True)
class LinViResult:
    z: np.ndarray
    e: np.ndarray
    inner_iters: int
    satisfied_inexact: bool


def phi(spec: LinViSpec, z) -> np.ndarray:
    """Evaluate the affine operator at z."""
    z = np.asarray(z, dtype=float)
    n = spec.anchor.shape[0]
    if z.shape != (n,) or spec.M.shape != (n, n) or spec.q_base.shape != (n,):
        raise DimensionMismatch("spec and z dimensions disagree")
    return spec.q_base + spec.M @ (z - spec.anchor)


def check_inexact(e, phi_z, z, x, rho_hat: float, mu_k: float) -> bool:
    """Both inexactness inequalities at level rho_hat (non-strict)."""
    e = np.asarray(e, dtype=float)
    dz = np.asarray(z, dtype=float) - np.asarray(x, dtype=float)
    ndz = np.linalg.norm(dz)
    bound = rho_hat * mu_k * ndz
    if np.linalg.norm(e) > bound:
        return False
    return float(e @ (np.asarray(phi_z) + dz)) <= bound * ndz


def solve_linvi(
    spec: LinViSpec,
    z0,
    rho_hat: float,
    mu_k: float,
    inner_tol_abs: float = 1e-10,
    inner_max_iter: int = 10000,
    projector=None,
) -> LinViResult:
    """Solve the subproblem inexactly; see the module docstring for the tests."""
    if isinstance(spec.set, WholeSpace):
        return _solve_direct(spec, rho_hat, mu_k)
    proj = projector.project if projector is not None else spec.set.project
    return _solve_projected(
        spec, z0, rho_hat, mu_k, inner_tol_abs, inner_max_iter, proj
    )


def _residual(spec, z, phi_z, proj):
    return z - proj(z - phi_z)


def _accepted(spec, z, e, phi_z, rho_hat, mu_k, inner_tol_abs):
    if np.linalg.norm(e) <= inner_tol_abs:
        return True
    return check_inexact(e, phi_z, z, spec.anchor, rho_hat, mu_k)


def _solve_direct(spec: LinViSpec, rho_hat: float, mu_k: float) -> LinViResult:
    """Whole space: phi(z) = 0 is a dense linear solve."""
    M = spec.M
    n = M.shape[0]
    if n <= _EIG_CHECK_LIMIT:
        c = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
        if c < 1e-14:
            raise SingularSystem(f"symmetric part has smallest eigenvalue {c:g}")
    try:
        z = np.linalg.solve(M, M @ spec.anchor - spec.q_base)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(z)):
        raise SingularSystem("direct solve produced non-finite entries")
    e = phi(spec, z)  # P_C is the identity, so e = phi(z) exactly
    ok = check_inexact(e, e, z, spec.anchor, rho_hat, mu_k) or bool(
        np.linalg.norm(e) <= 1e-10
    )
    return LinViResult(z=z, e=e, inner_iters=1, satisfied_inexact=ok)


def _solve_projected(
    spec, z0, rho_hat, mu_k, inner_tol_abs, inner_max_iter, proj
) -> LinViResult:
    M = spec.M
    z = proj(np.asarray(z0, dtype=float))
    tau = 1.0 / (1.0 + float(np.abs(M).sum(axis=1).max()))
    iters = 0
    history: list[float] = []
    gs_allowed = isinstance(spec.set, Box) and bool(np.all(M.diagonal() > 1e-12))

    while iters < inner_max_iter:
        phi_z = phi(spec, z)
        e = _residual(spec, z, phi_z, proj)
        if _accepted(spec, z, e, phi_z, rho_hat, mu_k, inner_tol_abs):
            return _finish(spec, z, rho_hat, mu_k, iters, proj)
        history.append(float(np.linalg.norm(e)))
        if gs_allowed and _should_switch(history, iters):
            result = _gauss_seidel(
                spec, z, rho_hat, mu_k, inner_tol_abs,
                inner_max_iter - iters, iters, proj,
            )
            if result is not None:
                return result
            gs_allowed = False  # diverged; stay with extragradient

        # Extragradient update with step-halving safeguard.
        zbar = proj(z - tau * phi_z)
        dz = z - zbar
        ndz2 = float(dz @ dz)
        phi_zbar = phi(spec, zbar)
        while ndz2 > 0.0 and tau > 1e-16:
            if float((phi_z - phi_zbar) @ dz) <= ndz2 / tau:
                break
            tau *= 0.5
            zbar = proj(z - tau * phi_z)
            dz = z - zbar
            ndz2 = float(dz @ dz)
            phi_zbar = phi(spec, zbar)
        if ndz2 > 0.0:
            z = proj(z - tau * phi_zbar)
        iters += 1

    raise InnerMaxIterExceeded(
        f"subproblem not solved to tolerance in {inner_max_iter} iterations"
    )


def _should_switch(history: list[float], iters: int) -> bool:
    if iters >= _STAGE_ONE_CAP:
        return True
    if len(history) > _STALL_WINDOW:
        old = history[-1 - _STALL_WINDOW]
        new = history[-1]
        if old > 0 and (old - new) / old < _STALL_RTOL:
            return True
    return False


def _gauss_seidel(
    spec, z, rho_hat, mu_k, inner_tol_abs, budget, base_iters, proj
):
    """Projected Gauss-Seidel sweeps on a box; None if it diverges."""
    M = spec.M
    lower, upper = spec.set.lower, spec.set.upper
    diag = M.diagonal()
    z = z.copy()
    w = phi(spec, z)  # maintained as phi(z) under coordinate updates
    e0 = np.linalg.norm(_residual(spec, z, w, proj))
    n = z.shape[0]
    sweeps = max(1, budget // max(n, 1))
    for sweep in range(sweeps):
        order = range(n - 1, -1, -1) if sweep % 2 == 0 else range(n)
        for i in order:
            zi = min(max(z[i] - w[i] / diag[i], lower[i]), upper[i])
            delta = zi - z[i]
            if delta != 0.0:
                w += M[:, i] * delta
                z[i] = zi
        e = _residual(spec, z, w, proj)
        iters = base_iters + (sweep + 1)
        if _accepted(spec, z, e, w, rho_hat, mu_k, inner_tol_abs):
            return _finish(spec, z, rho_hat, mu_k, iters, proj)
        if np.linalg.norm(e) > 1e8 * (e0 + 1e-300):
            return None
    raise InnerMaxIterExceeded(
        "subproblem not solved to tolerance within the sweep budget"
    )


def _finish(spec, z, rho_hat, mu_k, iters, proj) -> LinViResult:
    phi_z = phi(spec, z)
    e = _residual(spec, z, phi_z, proj)  # recomputed at the returned point
    ok = check_inexact(e, phi_z, z, spec.anchor, rho_hat, mu_k)
    return LinViResult(z=z, e=e, inner_iters=max(iters, 1), satisfied_inexact=ok)
