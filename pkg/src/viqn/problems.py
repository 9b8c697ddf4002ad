"""Benchmark problem suite: twelve variational-inequality test problems.

Problems ex1 and ex2 are nonlinear equations (whole space), ex3 and ex4 are
complementarity problems over the nonnegative orthant, ex5 and ex7-ex9 live
on boxes, and ex6 and ex10-ex12 use polyhedral sets exercising the QP
projection path.  Every problem carries an analytic Jacobian; a
forward-difference Jacobian is available as a fallback for solvers.

Randomized problems (ex4, ex6) draw from a counter-based Philox generator
keyed by the seed, in a fixed documented order, so construction is
reproducible bit for bit across platforms.  Building the same
(name, n, seed, params) twice yields identical problems.

Two problems deviate from their commonly printed statements and are flagged
``repaired``:

* ex8: the third component uses x2 + x3 + 2*x3^3 - 3.  The printed sign on
  x3 is inconsistent with the documented solutions (2,0,1,0) and (2,0,1,5);
  with the repaired sign both are exact.
* ex10: the coefficient matrix is printed with four rows for a
  five-dimensional problem; the row (0,0,0,0,1) is appended to square it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import merit
from .core import VIProblem
from .errors import BadDimension, NonFiniteEvaluation, UnknownProblem
from .sets import Box, Polyhedron, WholeSpace, nonneg_orthant, uniform_box

# Known solutions must reproduce a natural residual at most this large at
# registration time (default merit weight 0.01).
_REGISTRATION_TOL = 1e-8
_REGISTRATION_ALPHA = 0.01


@dataclass(frozen=True)
class ProblemSpec:
    """Build request plus registry metadata for one problem instance."""

    name: str
    n: int
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)
    x0_choices: tuple = ()  # tuple of (label, vector)
    repaired: bool = False

    def x0(self, label: str) -> np.ndarray:
        for lab, vec in self.x0_choices:
            if lab == label:
                return vec.copy()
        raise UnknownProblem(f"{self.name} has no initial point {label!r}")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _tridiag(n: int, sub: float, diag: float, sup: float) -> np.ndarray:
    A = np.zeros((n, n))
    np.fill_diagonal(A, diag)
    idx = np.arange(n - 1)
    A[idx, idx + 1] = sup
    A[idx + 1, idx] = sub
    return A


def random_matrix_suite(seed: int, n: int, kind: str) -> dict:
    """Deterministic random data for the seeded problems.

    kind "ex4": draw order is A-source (n x n, U(-5,5); strict upper kept,
    reflected with opposite sign), B (n x n, U(-5,5)), q (U(-500,500)),
    a (U(0,1)).  kind "ex6": Z (n x n, U(-5,5)), S-source (n x n, U(-5,5);
    skew-symmetrized like A), D diagonal (U(0.5,1.5)), Q (n x n, U(0,1)),
    b (U(0,10)); the constraint row count equals n.
    """
    rng = _rng(seed)
    if kind == "ex4":
        src = rng.uniform(-5.0, 5.0, (n, n))
        A = np.triu(src, 1) - np.triu(src, 1).T
        B = rng.uniform(-5.0, 5.0, (n, n))
        q = rng.uniform(-500.0, 500.0, n)
        a = rng.uniform(0.0, 1.0, n)
        return {"A": A, "B": B, "q": q, "a": a}
    if kind == "ex6":
        Z = rng.uniform(-5.0, 5.0, (n, n))
        src = rng.uniform(-5.0, 5.0, (n, n))
        S = np.triu(src, 1) - np.triu(src, 1).T
        D = rng.uniform(0.5, 1.5, n)
        Q = rng.uniform(0.0, 1.0, (n, n))
        b = rng.uniform(0.0, 10.0, n)
        return {"Z": Z, "S": S, "D": D, "Q": Q, "b": b}
    raise UnknownProblem(f"no random suite of kind {kind!r}")


def fd_jacobian(problem: VIProblem, x, step_rule=None) -> np.ndarray:
    """Forward-difference Jacobian, column i = (F(x + h_i e_i) - F(x)) / h_i.

    The default step is h_i = 1e-7 * (1 + |x_i|).
    """
    x = np.asarray(x, dtype=float)
    fx = problem.f(x)
    if not np.all(np.isfinite(fx)):
        raise NonFiniteEvaluation("F(x) is not finite")
    h = step_rule(x) if step_rule is not None else 1e-7 * (1.0 + np.abs(x))
    J = np.empty((problem.dim, problem.dim))
    for i in range(problem.dim):
        xp = x.copy()
        xp[i] += h[i]
        fp = problem.f(xp)
        if not np.all(np.isfinite(fp)):
            raise NonFiniteEvaluation(f"F(x + h e_{i}) is not finite")
        J[:, i] = (fp - fx) / h[i]
    return J


# ---------------------------------------------------------------------------
# Individual problem builders.  Each returns (eval_f, jacobian, set, known).


def _build_ex1(spec):
    def F(x):
        return x - np.sin(x)

    def J(x):
        return np.diag(1.0 - np.cos(x))

    return F, J, WholeSpace(spec.n), (np.zeros(spec.n),)


def _build_ex2(spec):
    A = _tridiag(spec.n, -1.0, 2.0, -1.0)

    def F(x):
        return A @ x + np.expm1(x)

    def J(x):
        return A + np.diag(np.exp(x))

    return F, J, WholeSpace(spec.n), (np.zeros(spec.n),)


def _ex3_matrix(n):
    M = np.triu(np.full((n, n), 2.0), 1)
    np.fill_diagonal(M, 1.0)
    return M


def _build_ex3(spec):
    M = _ex3_matrix(spec.n)
    q = -np.ones(spec.n)

    def F(x):
        return M @ x + q

    def J(x):
        return M

    star = np.zeros(spec.n)
    star[-1] = 1.0
    return F, J, nonneg_orthant(spec.n), (star,)


def _build_ex4(spec):
    data = random_matrix_suite(spec.seed, spec.n, "ex4")
    M = data["A"].T @ data["A"] + data["B"]
    q = data["q"]
    a = data["a"]
    rho = float(spec.params.get("rho", 1.0))

    def F(x):
        return rho * a * np.arctan(x) + M @ x + q

    def J(x):
        return M + np.diag(rho * a / (1.0 + x**2))

    return F, J, nonneg_orthant(spec.n), ()


def _build_ex5(spec):
    M = _tridiag(spec.n, -1.0, 4.0, -1.0)
    q = -np.ones(spec.n)

    def F(x):
        return M @ x + q

    def J(x):
        return M

    return F, J, uniform_box(0.0, 1.0, spec.n), ()


def _build_ex6(spec):
    data = random_matrix_suite(spec.seed, spec.n, "ex6")
    M = data["Z"] @ data["Z"].T + data["S"] + np.diag(data["D"])

    def F(x):
        return M @ x

    def J(x):
        return M

    return F, J, Polyhedron(data["Q"], data["b"]), ()


def _build_ex7(spec):
    def F(x):
        x1, x2, x3, x4 = x
        return np.array([
            3 * x1**2 + 2 * x1 * x2 + 2 * x2**2 + x3 + 3 * x4 - 6,
            2 * x1**2 + x1 + x2**2 + 10 * x3 + 2 * x4 - 2,
            3 * x1**2 + x1 * x2 + 2 * x2**2 + 2 * x3 + 9 * x4 - 9,
            x1**2 + 3 * x2**2 + 2 * x3 + 3 * x4 - 3,
        ])

    def J(x):
        x1, x2 = x[0], x[1]
        return np.array([
            [6 * x1 + 2 * x2, 2 * x1 + 4 * x2, 1.0, 3.0],
            [4 * x1 + 1.0, 2 * x2, 10.0, 2.0],
            [6 * x1 + x2, x1 + 4 * x2, 2.0, 9.0],
            [2 * x1, 6 * x2, 2.0, 3.0],
        ])

    return F, J, uniform_box(-0.5, 0.5, 4), ()


def _build_ex8(spec):
    # Third component carries the sign repair described in the module
    # docstring; both documented solutions are exact with it.
    def F(x):
        x1, x2, x3, x4 = x
        return np.array([
            x1**3 - 8,
            x2 - x3 + x2**3 + 3,
            x2 + x3 + 2 * x3**3 - 3,
            x4 - 2 * x4**3,
        ])

    def J(x):
        x1, x2, x3, x4 = x
        return np.array([
            [3 * x1**2, 0.0, 0.0, 0.0],
            [0.0, 1 + 3 * x2**2, -1.0, 0.0],
            [0.0, 1.0, 1 + 6 * x3**2, 0.0],
            [0.0, 0.0, 0.0, 1 - 6 * x4**2],
        ])

    known = (np.array([2.0, 0.0, 1.0, 0.0]), np.array([2.0, 0.0, 1.0, 5.0]))
    return F, J, uniform_box(0.0, 5.0, 4), known


def _build_ex9(spec):
    def F(x):
        x1, x2, x3, x4 = x
        return np.array([
            400 * x1**3 + 2 * x1 - 400 * x1 * x2 - 2,
            -200 * x1**2 + 200.2 * x2 + 19.8 * x4 - 40,
            360 * x1**3 + 2 * x2 - 360 * x3 * x4 - 2,
            19.8 * x2 - 180 * x3**2 + 220.2 * x4**2 - 40,
        ])

    def J(x):
        x1, x2, x3, x4 = x
        return np.array([
            [1200 * x1**2 + 2 - 400 * x2, -400 * x1, 0.0, 0.0],
            [-400 * x1, 200.2, 0.0, 19.8],
            [1080 * x1**2, 2.0, -360 * x4, -360 * x3],
            [0.0, 19.8, -360 * x3, 440.4 * x4],
        ])

    return F, J, uniform_box(-10.0, 10.0, 4), ()


def _build_ex10(spec):
    n = 5
    # The printed matrix has four rows; the appended fifth row squares it.
    M = np.array([
        [1.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
    ])
    q = np.array([-1.0, -1.0, -0.5, -0.5, -1.0])

    def F(x):
        return M @ x + q

    def J(x):
        return M

    # sum(x) <= n,  sum(i * x_i) >= n + 1,  x_i >= 0 for i < n (x_n free).
    A = np.vstack([np.ones(n), -np.arange(1.0, n + 1.0)])
    b = np.array([float(n), -(n + 1.0)])
    lower = np.zeros(n)
    lower[-1] = -np.inf
    return F, J, Polyhedron(A, b, lower=lower), ()


_EX11_M = np.array([
    [0.726, -0.949, 0.266, -1.193, -0.504],
    [1.645, 0.678, 0.333, -0.217, -1.443],
    [-1.016, -0.225, 0.769, 0.934, 1.007],
    [1.063, 0.567, -1.144, 0.550, -0.548],
    [-0.259, 1.453, -1.073, 0.509, 1.026],
])
_EX11_Q = np.array([5.308, 0.008, -0.938, 1.024, -1.312])


def _build_ex11(spec):
    rho = float(spec.params.get("rho", 1.0))

    def F(x):
        return _EX11_M @ x + rho * np.arctan(x - 2.0) + _EX11_Q

    def J(x):
        return _EX11_M + np.diag(rho / (1.0 + (x - 2.0) ** 2))

    # 10 <= sum(x) <= 50, x >= 0.  (2,...,2) lands on the lower sum bound
    # with F there equal to 2*ones for every rho, so it is exact there.
    A = np.vstack([np.ones(5), -np.ones(5)])
    b = np.array([50.0, -10.0])
    star = np.full(5, 2.0)
    return F, J, Polyhedron(A, b, lower=np.zeros(5)), (star,)


_EX12_M = np.array([
    [3.0, -4.0, -16.0, -15.0, -4.0],
    [4.0, 1.0, -5.0, -10.0, -11.0],
    [16.0, 5.0, 2.0, -11.0, -7.0],
    [15.0, 10.0, 11.0, 3.0, -10.0],
    [4.0, 11.0, 7.0, 10.0, 1.0],
])
_EX12_Q = np.array([-15.0, 10.0, -50.0, -30.0, -25.0])
_EX12_C = np.array([0.004, 0.007, 0.005, 0.009, 0.008])
_EX12_A = np.array([
    [0.0, 0.0, -0.5, 0.0, -2.0],
    [-2.0, -2.0, 0.0, -0.5, -2.0],
    [2.0, 2.0, -4.0, 2.0, -3.0],
    [-5.0, 3.0, -2.0, 0.0, 2.0],
])
_EX12_B = np.array([-10.0, -10.0, 13.0, 18.0])


def _ex12_solution() -> np.ndarray:
    # At the solution x3 = x4 = 0, the first constraint row is active
    # (0.5*x3 + 2*x5 = 10 forces x5 = 5), and the first two components solve
    # F1 = F2 = 0.  Newton on that 2x2 system from the 2-decimal estimate.
    v = np.array([9.08, 4.84])
    for _ in range(60):
        f = np.array([
            3 * v[0] - 4 * v[1] + 0.004 * v[0] ** 4 - 35.0,
            4 * v[0] + v[1] + 0.007 * v[1] ** 4 - 45.0,
        ])
        Jv = np.array([
            [3 + 0.016 * v[0] ** 3, -4.0],
            [4.0, 1 + 0.028 * v[1] ** 3],
        ])
        step = np.linalg.solve(Jv, f)
        v = v - step
        if np.linalg.norm(step) < 1e-14:
            break
    return np.array([v[0], v[1], 0.0, 0.0, 5.0])


def _build_ex12(spec):
    def F(x):
        return _EX12_M @ x + _EX12_C * x**4 + _EX12_Q

    def J(x):
        return _EX12_M + np.diag(4.0 * _EX12_C * x**3)

    star = _ex12_solution()
    return F, J, Polyhedron(_EX12_A, _EX12_B, lower=np.zeros(5)), (star,)


# ---------------------------------------------------------------------------
# Registry.


@dataclass(frozen=True)
class ProblemDef:
    name: str
    builder: Callable
    default_n: int
    fixed_n: Optional[int]
    seeded: bool
    repaired: bool
    param_defaults: dict
    summary: str


def _points(*vecs):
    return tuple((f"p{i}", np.asarray(v, dtype=float)) for i, v in enumerate(vecs))


def _x0_choices(name: str, n: int) -> tuple:
    if name in ("ex1", "ex2", "ex3", "ex4", "ex6"):
        return _points(np.ones(n))
    if name == "ex5":
        return _points(-np.ones(n))
    if name == "ex7":
        return _points(
            (5, -1, 1, 1), (-1, -5, 0, -3), (0.6, 4, 0, 8),
            (1, -2, 0.7, 1), (1, -6, 5, 3), (-1, -1, -1, -1),
        )
    if name == "ex8":
        return _points((1, 1, 1, 1), (-1, -1, -1, -1), (-6, -6, -10, -1))
    if name == "ex9":
        return _points((3, 3, 3, 3), (0, 0, 0, 0), (1, 1, 1, 1))
    if name == "ex10":
        return _points((10, 0, 0, 0, 0), (10, 0, 10, 0, 10), (25, 0, 0, 0, 0))
    if name == "ex11":
        return _points(
            (25, 0, 0, 0, 0), (10, 0, 10, 0, 10),
            (0, 2.5, 2.5, 2.5, 2.5), (10, 0, 0, 0, 0),
        )
    if name == "ex12":
        return _points((0, 0, 100, 0, 0), (10, 0, 10, 0, 10), (0, 2.5, 2.5, 2.5, 2.5))
    raise UnknownProblem(name)


REGISTRY: dict[str, ProblemDef] = {
    d.name: d
    for d in [
        ProblemDef("ex1", _build_ex1, 100, None, False, False, {},
                   "x - sin(x) = 0 on the whole space"),
        ProblemDef("ex2", _build_ex2, 100, None, False, False, {},
                   "tridiagonal linear part plus exp(x)-1 on the whole space"),
        ProblemDef("ex3", _build_ex3, 100, None, False, False, {},
                   "upper-triangular linear complementarity, degenerate solution"),
        ProblemDef("ex4", _build_ex4, 100, None, True, False, {"rho": 1.0},
                   "seeded dense linear part plus arctan nonlinearity, orthant"),
        ProblemDef("ex5", _build_ex5, 100, None, False, False, {},
                   "tridiagonal affine mapping on the unit box"),
        ProblemDef("ex6", _build_ex6, 10, None, True, False, {},
                   "seeded positive-definite mapping on a random polyhedron"),
        ProblemDef("ex7", _build_ex7, 4, 4, False, False, {},
                   "Kojima-Shindo mapping on the box [-0.5, 0.5]^4"),
        ProblemDef("ex8", _build_ex8, 4, 4, False, True, {},
                   "cubic mapping on [0,5]^4 with two degenerate solutions"),
        ProblemDef("ex9", _build_ex9, 4, 4, False, False, {},
                   "Wood-like quartic mapping on [-10,10]^4"),
        ProblemDef("ex10", _build_ex10, 5, 5, False, True, {},
                   "affine mapping on an interval-sum polyhedron, free last variable"),
        ProblemDef("ex11", _build_ex11, 5, 5, False, False, {"rho": 1.0},
                   "affine plus arctan mapping on an interval-sum polyhedron"),
        ProblemDef("ex12", _build_ex12, 5, 5, False, False, {},
                   "affine plus quartic mapping on a general polyhedron"),
    ]
}


def make_spec(
    name: str,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    params: Optional[dict] = None,
) -> ProblemSpec:
    """Resolve a problem name plus options into a concrete build request."""
    if name not in REGISTRY:
        raise UnknownProblem(f"unknown problem {name!r}")
    d = REGISTRY[name]
    if n is None:
        n = d.default_n
    if d.fixed_n is not None and n != d.fixed_n:
        raise BadDimension(f"{name} is fixed at n={d.fixed_n}, got n={n}")
    if n < 1:
        raise BadDimension(f"n must be positive, got {n}")
    merged = dict(d.param_defaults)
    if params:
        merged.update(params)
    return ProblemSpec(
        name=name,
        n=int(n),
        seed=(int(seed) if seed is not None else 0) if d.seeded else None,
        params=merged,
        x0_choices=_x0_choices(name, int(n)),
        repaired=d.repaired,
    )


def build_problem(spec: ProblemSpec) -> VIProblem:
    """Construct the problem and verify its known solutions at registration."""
    if spec.name not in REGISTRY:
        raise UnknownProblem(f"unknown problem {spec.name!r}")
    F, J, set_, known = REGISTRY[spec.name].builder(spec)
    problem = VIProblem(
        dim=spec.n,
        eval_f=F,
        jacobian=J,
        set=set_,
        known_solutions=tuple(np.asarray(v, dtype=float) for v in known),
        label=spec.name,
    )
    for star in problem.known_solutions:
        res = merit.natural_residual(problem, star, _REGISTRATION_ALPHA)
        if res > _REGISTRATION_TOL:
            raise ValueError(
                f"{spec.name}: declared solution has residual {res:g} "
                f"above the registration bound {_REGISTRATION_TOL:g}"
            )
    return problem


def get_problem(
    name: str,
    n: Optional[int] = None,
    seed: Optional[int] = None,
    params: Optional[dict] = None,
):
    """Convenience wrapper: returns (spec, problem)."""
    spec = make_spec(name, n=n, seed=seed, params=params)
    return spec, build_problem(spec)


def list_problems() -> list[dict]:
    """Registry metadata for the CLI `list` subcommand."""
    rows = []
    for name, d in REGISTRY.items():
        spec = make_spec(name)
        problem = build_problem(spec)
        rows.append({
            "name": name,
            "n": spec.n,
            "fixed_n": d.fixed_n,
            "seeded": d.seeded,
            "x0_labels": [lab for lab, _ in spec.x0_choices],
            "known_solutions": [v.tolist() for v in problem.known_solutions],
            "repaired": spec.repaired,
            "summary": d.summary,
        })
    return rows
